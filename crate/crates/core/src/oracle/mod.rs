//! Exact finite-field ground truth: explicit representations, Hom/Ext by
//! linear algebra, γ probes, King checks, HN filtrations of points, point
//! counts and stratum censuses.

pub mod census;
pub mod gamma;
pub mod homology;
pub mod king;
pub mod linear;
pub mod rep;

pub use census::{
    candidate_count, census_counts, count_full_points_by_orbits, count_rep_full_points, for_each_full_orbit_rep,
    for_each_point, orbit_census, semistable_point_exists, stratum_census, CensusCounts, CensusReport, StratumLine, DEFAULT_BUDGET,
};
pub use gamma::{estimate_gamma, GammaEstimate, ProbeGamma};
pub use homology::{
    end_trivial_check, euler_identity, ext1_direct, ext1_q, ext2_dim, hom_at, hom_dim, hom_formula_check, hom_space,
    jacobian_check, jacobian_tangent_dim, kernel_rep, rigidity_check, tangent_dim, EulerCheck,
};
pub use king::{hn_filtration_point, king_check, HnFiltration, KingClass, PointAnalyzer, SubspaceLattice};
pub use rep::{evaluate_relations, random_full_point, random_point, FqRep, GroupElement, QRep};
