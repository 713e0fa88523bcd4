//! Planning simulator for hybrid ground-device / UAV emergency networks.
//!
//! After a disaster knocks out fixed infrastructure, survivors' devices form a
//! device-to-device mesh, the mesh is partitioned into communities, each
//! community elects a caching head, and a small UAV fleet flies out to collect
//! the cached data. This crate models that whole chain as one deterministic
//! pipeline:
//!
//! 1. [`terrain`] — gridded elevation model, clearance checks, terrain-following
//!    wind field.
//! 2. [`radio`] — free-space and air-to-ground path loss, outage under
//!    log-normal shadowing, SINR and link capacity.
//! 3. [`d2dnet`] — ground-device placement and the directed, weighted link
//!    graph with per-link power assignment.
//! 4. [`community`] — directed weighted modularity, spectral bisection, and the
//!    alternating partition/topology fixed point.
//! 5. [`keynode`] — six node centralities and entropy-weighted TOPSIS election
//!    of each community's caching head.
//! 6. [`d2vplan`] — hover-altitude bounds, collection waypoints, and greedy
//!    assignment of caching heads to UAVs.
//! 7. [`uavdyn`] — quadrotor motion power, time-optimal rest-to-rest segment
//!    plans, closed-loop tracking, and the mission time/energy ledger.
//! 8. [`moea`] — decomposition-based multi-objective search over fleet size and
//!    transmit power, with knee-point selection.
//! 9. [`scenario`] — configuration, orchestration, and artifact emission.
//!
//! Every stage is a pure function of its inputs and a seed: two runs with the
//! same configuration produce byte-identical artifacts.

pub mod community;
pub mod config;
pub mod d2dnet;
pub mod d2vplan;
pub mod keynode;
pub mod moea;
pub mod output;
pub mod radio;
pub mod scenario;
pub mod terrain;
pub mod uavdyn;

/// 3-D position / vector type used throughout (meters, SI).
pub type Vec3 = nalgebra::Vector3<f64>;
