use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Each purpose gets its own generator so that
/// two runs sharing a seed consume identical numbers for identical roles,
/// whichever model or policy is being simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamPurpose {
    Arrivals = 0,
    EntryService = 1,
    HelpService = 2,
    ReturnService = 3,
    Fitting = 4,
    HelpDecision = 5,
    Patience = 6,
    RevertDelay = 7,
    ConditionPolling = 8,
}

const PURPOSE_SLOTS: u64 = 16;

/// Seeded generator identified by `(purpose, replication)`.
#[derive(Debug, Clone)]
pub struct RandomStream {
    purpose: StreamPurpose,
    replication: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(master_seed: u64, purpose: StreamPurpose, replication: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(replication * PURPOSE_SLOTS + purpose as u64);
        Self {
            purpose,
            replication,
            rng,
        }
    }

    pub fn purpose(&self) -> StreamPurpose {
        self.purpose
    }

    pub fn replication(&self) -> u64 {
        self.replication
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

/// Every stream a single replication needs.
#[derive(Debug, Clone)]
pub struct StreamSet {
    pub arrivals: RandomStream,
    pub entry_service: RandomStream,
    pub help_service: RandomStream,
    pub return_service: RandomStream,
    pub fitting: RandomStream,
    pub help_decision: RandomStream,
    pub patience: RandomStream,
    pub revert_delay: RandomStream,
    pub polling: RandomStream,
}

impl StreamSet {
    pub fn new(master_seed: u64, replication: u64) -> Self {
        let s = |p| RandomStream::new(master_seed, p, replication);
        Self {
            arrivals: s(StreamPurpose::Arrivals),
            entry_service: s(StreamPurpose::EntryService),
            help_service: s(StreamPurpose::HelpService),
            return_service: s(StreamPurpose::ReturnService),
            fitting: s(StreamPurpose::Fitting),
            help_decision: s(StreamPurpose::HelpDecision),
            patience: s(StreamPurpose::Patience),
            revert_delay: s(StreamPurpose::RevertDelay),
            polling: s(StreamPurpose::ConditionPolling),
        }
    }
}
