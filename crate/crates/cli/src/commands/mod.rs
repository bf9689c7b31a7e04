pub mod canonical;
pub mod compare;
pub mod diagrams;
pub mod maslov;
pub mod propagate;
pub mod star;
pub mod tree;
