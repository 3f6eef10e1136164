//! Simplicial covers of the nerve of SU(2), circle-valued cochains on them, the weak
//! string 2-group built from a degree-3 cocycle, Grassmann differentiation of that
//! 2-group, cocycle validators with connection data, and field checks for
//! self-dual strings.

pub mod cocycle;
pub mod cover;
pub mod forms;
pub mod grassmann;
pub mod linfty;
pub mod group;
pub mod report;
pub mod sampling;
pub mod sds;
pub mod sm;
pub mod superdiff;
pub mod twogroup;

pub use group::{Algebra, AlgebraElement, CMat, GroupError, Spin4, Su2};
