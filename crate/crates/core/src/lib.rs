//! Exact areas, Dehn functions and mean Dehn functions of finite group
//! presentations and of families of them.

pub mod area;
pub mod dehn;
pub mod exec;
pub mod families;
pub mod mean;
pub mod presentation;
pub mod realization;
pub mod words;

pub use area::{
    area_bruteforce, area_search, verify_certificate, AreaCertificate, AreaError, AreaResult, AreaSolver,
    BruteForceOracle, CertificateStep, SearchConfig,
};
pub use dehn::{
    classify_growth, dehn_function, enumerate_null_words, family_dehn_function, DehnEntry, DehnError, DehnTable,
    GrowthClass, GrowthLabel,
};
pub use exec::{Executor, Serial};
pub use families::{FamilyError, FamilySpec, Member, PolycyclicData};
pub use mean::{cyclic_family_closed_forms, MeanError, MeanReport, NullWordCensus};
pub use presentation::{normalize_relators, parse_presentation, Presentation};
pub use realization::{coset_enumerate, FiniteRealization};
pub use words::{free_reduce, parse_word, Letter, Word};
