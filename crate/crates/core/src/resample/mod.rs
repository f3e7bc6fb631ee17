//! Minority oversampling: brute-force Euclidean k-NN and Borderline-SMOTE.

mod knn;
mod smote;

pub use knn::NeighborIndex;
pub use smote::{
    borderline_smote, partition_minority, MinorityPartition, SmoteConfig, SmoteOutcome,
    SmoteTarget, SmoteVariant, SyntheticOrigin,
};
