pub mod error;
pub mod floquet;
pub mod linalg;
pub mod models;
pub mod ode;
pub mod perturb;
pub mod series;

pub use error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub j: usize,
    pub k: i64,
}
impl std::fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.j + 1, self.k)
    }
}
