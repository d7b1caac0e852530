pub mod cover;
pub mod error;
pub mod exceptional;
pub mod field;
pub mod heights;
pub mod interval;
pub mod linalg;
pub mod modp;
pub mod places;
pub mod poly;
pub mod rat;
pub mod scattering;
pub mod roots;
pub mod ruvojta;
pub mod ser;
pub mod twisted;
