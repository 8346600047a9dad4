//! Analytical test functions, exact variance-based references and the
//! Monte-Carlo harness behind the reference tables.

mod experiment;
mod functions;
mod sampling;
mod tables;

pub use experiment::{
    experiment_dataset, run_experiment, ExperimentConfig, ExperimentMethod, MetricsReport, ScreeningModel,
};
pub use functions::{
    additive_model, analytic_sobol_additive, analytic_sobol_interaction, elementary, exponential_constants,
    interaction_model, morris_constants, morris_model, sinusoidal_constant, ElementaryKind, InteractionSobol,
};
pub use sampling::{sample_columns, sample_inputs, to_columns, InputDistribution};
pub use tables::{
    repetitions, sensitivity_table, table1, table2, table3, table3_cell, table3_params, table4, Scale, ShareModel,
    ShareTable, SCREENING_INFLUENTIAL, TABLE1_MEASURES, TABLE1_MODELS, TABLE2_ALPHAS, TABLE3_METHODS, TABLE3_RATIOS,
    TABLE3_SIZES, TABLE4_METHODS, TABLE4_SIZES,
};
