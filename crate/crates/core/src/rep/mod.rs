//! Representations of acyclic quivers over the rationals: Hom spaces,
//! kernels and cokernels, knitting of AR components and their radicals.

pub mod hom;
pub mod irreducible;
pub mod knit;
pub mod module;
pub mod quiver;
pub mod radical;

pub use hom::{endomorphisms, find_iso, hom, is_indecomposable, radical, HomSpace, IsoResult};
pub use irreducible::{
    check_sectional_family, is_irreducible, tuple_irreducible, FamilyCheck, FamilyPath, SectionalFamily,
};
pub use knit::{knit_ar_component, ArQuiver, Direction};
pub use module::{cokernel, kernel, map_from_path, Morphism, Rep};
pub use quiver::Quiver;
pub use radical::{rad_power, RadPower, Radicals, Route};
