//! Traveling-salesman instances and annealing.
//!
//! A tour visits every city once and returns; city 0 is pinned at stop 0
//! so each cycle has `(N-1)!` labelled forms. Annealing moves exchange the
//! cities at two stops, which in the unit encoding `n_ia` (city `i` at
//! stop `a`) flips four units at once and keeps both one-per-row and
//! one-per-column constraints.
//!
//! ```
//! use qanneal::tsp::{exhaustive_optimal, random_instance};
//!
//! let inst = random_instance(7, 3).unwrap();
//! let best = exhaustive_optimal(&inst).unwrap();
//! assert_eq!(best.visited, 360);
//! ```

mod anneal;
mod encoding;
mod exact;
mod generate;
mod instance;
mod tsplib;

pub use anneal::{merge_tsp_records, qa_tsp, qa_tsp_ensemble, qa_tsp_run, sa_tsp, sa_tsp_tours, trials_per_step, TourSliceArray, TspRecord};
pub use encoding::{tour_spin_roundtrip, UnitMatrix};
pub use exact::{exhaustive_optimal, held_karp_length, OptimalTours, MAX_EXHAUSTIVE_CITIES, MAX_HELD_KARP_CITIES};
pub use generate::{generate_instance, random_instance, TspKind, FAMILY_CITIES, ULYSSES_MEAN_DISTANCE};
pub use instance::{tour_length, Tour, TspInstance};
pub use tsplib::{parse_tsplib, read_tsplib, EdgeWeightType, TsplibProblem};
