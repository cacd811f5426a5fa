//! Block matrices and membership weights of the builtin benchmark scenarios,
//! one `K x L` matrix per rating level (strict users and poor items first).
//!
//! Level 4 of the nine-cluster set has only eight rows;
//! [`super::builtin_scenario`] fills in the ninth.

pub(super) const MU5_LEVEL1: &[&[f64; 5]] = &[
    &[0.65, 0.45, 0.25, 0.15, 0.10],
    &[0.45, 0.25, 0.05, 0.05, 0.05],
    &[0.10, 0.10, 0.05, 0.05, 0.05],
    &[0.10, 0.10, 0.02, 0.02, 0.02],
    &[0.10, 0.12, 0.02, 0.02, 0.02],
];
pub(super) const MU5_LEVEL2: &[&[f64; 5]] = &[
    &[0.18, 0.28, 0.38, 0.28, 0.25],
    &[0.28, 0.38, 0.48, 0.30, 0.20],
    &[0.40, 0.20, 0.10, 0.10, 0.10],
    &[0.35, 0.20, 0.05, 0.05, 0.05],
    &[0.25, 0.15, 0.05, 0.05, 0.05],
];
pub(super) const MU5_LEVEL3: &[&[f64; 5]] = &[
    &[0.10, 0.28, 0.30, 0.30, 0.30],
    &[0.20, 0.30, 0.40, 0.30, 0.30],
    &[0.35, 0.45, 0.50, 0.30, 0.20],
    &[0.30, 0.35, 0.40, 0.30, 0.20],
    &[0.30, 0.30, 0.30, 0.20, 0.10],
];
pub(super) const MU5_LEVEL4: &[&[f64; 5]] = &[
    &[0.05, 0.05, 0.05, 0.25, 0.25],
    &[0.05, 0.05, 0.05, 0.25, 0.35],
    &[0.10, 0.20, 0.30, 0.40, 0.40],
    &[0.20, 0.30, 0.48, 0.38, 0.28],
    &[0.25, 0.28, 0.38, 0.28, 0.18],
];
pub(super) const MU5_LEVEL5: &[&[f64; 5]] = &[
    &[0.02, 0.02, 0.02, 0.10, 0.10],
    &[0.02, 0.02, 0.02, 0.10, 0.10],
    &[0.05, 0.05, 0.05, 0.15, 0.25],
    &[0.05, 0.05, 0.05, 0.25, 0.45],
    &[0.10, 0.15, 0.25, 0.45, 0.65],
];

pub(super) const MU7_LEVEL1: &[&[f64; 7]] = &[
    &[0.65, 0.55, 0.45, 0.35, 0.25, 0.15, 0.10],
    &[0.45, 0.35, 0.25, 0.15, 0.05, 0.05, 0.05],
    &[0.25, 0.20, 0.15, 0.10, 0.05, 0.05, 0.05],
    &[0.10, 0.10, 0.10, 0.05, 0.05, 0.05, 0.05],
    &[0.10, 0.10, 0.10, 0.05, 0.05, 0.05, 0.05],
    &[0.10, 0.10, 0.02, 0.02, 0.02, 0.02, 0.02],
    &[0.10, 0.10, 0.06, 0.06, 0.02, 0.02, 0.02],
];
pub(super) const MU7_LEVEL2: &[&[f64; 7]] = &[
    &[0.18, 0.23, 0.28, 0.33, 0.38, 0.28, 0.25],
    &[0.28, 0.33, 0.38, 0.43, 0.48, 0.30, 0.25],
    &[0.45, 0.45, 0.40, 0.35, 0.30, 0.25, 0.20],
    &[0.40, 0.30, 0.20, 0.10, 0.10, 0.10, 0.10],
    &[0.35, 0.25, 0.15, 0.05, 0.05, 0.05, 0.10],
    &[0.35, 0.20, 0.05, 0.05, 0.05, 0.05, 0.05],
    &[0.25, 0.20, 0.15, 0.10, 0.05, 0.05, 0.05],
];
pub(super) const MU7_LEVEL3: &[&[f64; 7]] = &[
    &[0.10, 0.15, 0.20, 0.25, 0.30, 0.30, 0.30],
    &[0.20, 0.25, 0.30, 0.35, 0.40, 0.30, 0.35],
    &[0.15, 0.20, 0.30, 0.40, 0.45, 0.40, 0.35],
    &[0.35, 0.40, 0.45, 0.50, 0.40, 0.30, 0.20],
    &[0.40, 0.45, 0.40, 0.40, 0.35, 0.30, 0.25],
    &[0.30, 0.35, 0.40, 0.35, 0.30, 0.25, 0.20],
    &[0.30, 0.35, 0.35, 0.30, 0.30, 0.20, 0.10],
];
pub(super) const MU7_LEVEL4: &[&[f64; 7]] = &[
    &[0.05, 0.05, 0.05, 0.05, 0.05, 0.20, 0.25],
    &[0.05, 0.05, 0.05, 0.05, 0.05, 0.25, 0.25],
    &[0.10, 0.10, 0.10, 0.10, 0.15, 0.20, 0.30],
    &[0.10, 0.15, 0.20, 0.30, 0.35, 0.40, 0.40],
    &[0.10, 0.15, 0.30, 0.40, 0.45, 0.40, 0.40],
    &[0.20, 0.30, 0.48, 0.43, 0.38, 0.33, 0.28],
    &[0.25, 0.25, 0.29, 0.34, 0.38, 0.28, 0.18],
];
pub(super) const MU7_LEVEL5: &[&[f64; 7]] = &[
    &[0.02, 0.02, 0.02, 0.02, 0.02, 0.07, 0.10],
    &[0.02, 0.02, 0.02, 0.02, 0.02, 0.10, 0.10],
    &[0.05, 0.05, 0.05, 0.05, 0.05, 0.10, 0.10],
    &[0.05, 0.05, 0.05, 0.05, 0.10, 0.15, 0.25],
    &[0.05, 0.05, 0.05, 0.10, 0.10, 0.20, 0.20],
    &[0.05, 0.05, 0.05, 0.15, 0.25, 0.35, 0.45],
    &[0.10, 0.10, 0.15, 0.20, 0.25, 0.45, 0.65],
];

pub(super) const MU9_LEVEL1: &[&[f64; 9]] = &[
    &[0.70, 0.65, 0.55, 0.45, 0.35, 0.25, 0.15, 0.10, 0.10],
    &[0.55, 0.45, 0.35, 0.25, 0.15, 0.05, 0.05, 0.05, 0.05],
    &[0.40, 0.30, 0.20, 0.10, 0.10, 0.05, 0.05, 0.05, 0.05],
    &[0.25, 0.15, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05],
    &[0.10, 0.10, 0.10, 0.10, 0.05, 0.05, 0.05, 0.05, 0.05],
    &[0.10, 0.10, 0.10, 0.02, 0.02, 0.02, 0.02, 0.02, 0.02],
    &[0.10, 0.10, 0.02, 0.02, 0.02, 0.02, 0.02, 0.02, 0.02],
    &[0.10, 0.10, 0.10, 0.06, 0.06, 0.02, 0.02, 0.02, 0.02],
    &[0.05, 0.05, 0.05, 0.02, 0.02, 0.02, 0.02, 0.02, 0.02],
];
pub(super) const MU9_LEVEL2: &[&[f64; 9]] = &[
    &[0.15, 0.18, 0.23, 0.28, 0.33, 0.38, 0.28, 0.25, 0.20],
    &[0.23, 0.28, 0.33, 0.38, 0.43, 0.48, 0.30, 0.20, 0.15],
    &[0.31, 0.36, 0.41, 0.46, 0.36, 0.31, 0.21, 0.21, 0.21],
    &[0.41, 0.41, 0.41, 0.36, 0.31, 0.26, 0.16, 0.11, 0.11],
    &[0.50, 0.40, 0.30, 0.20, 0.10, 0.10, 0.10, 0.10, 0.10],
    &[0.40, 0.35, 0.20, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05],
    &[0.35, 0.20, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05],
    &[0.30, 0.25, 0.20, 0.15, 0.10, 0.05, 0.05, 0.05, 0.05],
    &[0.25, 0.15, 0.15, 0.08, 0.08, 0.08, 0.03, 0.03, 0.03],
];
pub(super) const MU9_LEVEL3: &[&[f64; 9]] = &[
    &[0.08, 0.10, 0.15, 0.20, 0.25, 0.30, 0.30, 0.30, 0.30],
    &[0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.30, 0.30, 0.35],
    &[0.22, 0.27, 0.32, 0.37, 0.42, 0.47, 0.42, 0.32, 0.27],
    &[0.27, 0.32, 0.37, 0.42, 0.47, 0.52, 0.42, 0.32, 0.27],
    &[0.30, 0.35, 0.40, 0.45, 0.50, 0.40, 0.30, 0.20, 0.15],
    &[0.35, 0.30, 0.35, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15],
    &[0.30, 0.35, 0.40, 0.35, 0.30, 0.25, 0.20, 0.15, 0.10],
    &[0.30, 0.30, 0.35, 0.35, 0.30, 0.30, 0.20, 0.10, 0.10],
    &[0.40, 0.50, 0.40, 0.30, 0.30, 0.20, 0.10, 0.05, 0.05],
];
pub(super) const MU9_LEVEL4: &[&[f64; 9]] = &[
    &[0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.20, 0.25, 0.30],
    &[0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.25, 0.35, 0.35],
    &[0.05, 0.05, 0.15, 0.15, 0.15, 0.15, 0.30, 0.35, 0.40],
    &[0.05, 0.10, 0.15, 0.20, 0.30, 0.35, 0.40, 0.40, 0.40],
    &[0.10, 0.20, 0.30, 0.48, 0.43, 0.38, 0.33, 0.28, 0.28],
    &[0.20, 0.30, 0.48, 0.43, 0.38, 0.33, 0.28, 0.28, 0.28],
    &[0.20, 0.25, 0.25, 0.29, 0.34, 0.38, 0.28, 0.18, 0.13],
    &[0.20, 0.20, 0.30, 0.40, 0.30, 0.40, 0.40, 0.25, 0.15],
];
pub(super) const MU9_LEVEL5: &[&[f64; 9]] = &[
    &[0.02, 0.02, 0.02, 0.02, 0.02, 0.02, 0.07, 0.10, 0.10],
    &[0.02, 0.02, 0.02, 0.02, 0.02, 0.02, 0.10, 0.10, 0.10],
    &[0.02, 0.02, 0.02, 0.02, 0.02, 0.02, 0.07, 0.07, 0.07],
    &[0.02, 0.02, 0.02, 0.02, 0.02, 0.02, 0.07, 0.17, 0.17],
    &[0.05, 0.05, 0.05, 0.05, 0.05, 0.10, 0.15, 0.25, 0.30],
    &[0.05, 0.05, 0.05, 0.05, 0.15, 0.25, 0.35, 0.45, 0.50],
    &[0.05, 0.05, 0.05, 0.15, 0.25, 0.35, 0.45, 0.50, 0.55],
    &[0.10, 0.10, 0.10, 0.15, 0.20, 0.25, 0.45, 0.65, 0.70],
    &[0.10, 0.10, 0.10, 0.20, 0.30, 0.30, 0.45, 0.65, 0.75],
];

pub(super) const ALPHA5: [f64; 5] = [0.10, 0.20, 0.40, 0.20, 0.10];
pub(super) const BETA5: [f64; 5] = [0.10, 0.15, 0.45, 0.25, 0.05];
pub(super) const ALPHA7: [f64; 7] = [0.07, 0.11, 0.17, 0.30, 0.17, 0.11, 0.07];
pub(super) const BETA7: [f64; 7] = [0.07, 0.10, 0.15, 0.41, 0.14, 0.08, 0.05];
pub(super) const ALPHA9: [f64; 9] = [0.02, 0.05, 0.12, 0.16, 0.30, 0.12, 0.15, 0.05, 0.03];
pub(super) const BETA9: [f64; 9] = [0.03, 0.05, 0.12, 0.17, 0.30, 0.14, 0.12, 0.07, 0.03];
