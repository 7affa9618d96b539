"""Causal discovery, treatment-effect estimation and predictive attribution
for integer-coded tabular data.

The heavy lifting lives in the compiled extension; this package re-exports
its surface.
"""

from ._core import (  # noqa: F401
    Codebook,
    CodedDataset,
    CiResult,
    Dag,
    DiscreteSCM,
    DmlConfig,
    EffectsTable,
    Knowledge,
    MixedGraph,
    MlpConfig,
    MlpModel,
    __version__,
    accuracy,
    adjustment_set,
    chi_square_ci,
    clean,
    collapse_binary_classes,
    cpdag_of,
    cross_validate,
    d_separated,
    discover,
    dml_ate,
    exact_shap,
    lasso_fit,
    load_csv,
    make_canonical_scm,
    make_survey_scm,
    mean_abs_shap,
    parse_dataset_csv,
    path_blocked,
    predict,
    predict_classes,
    run_cli,
    sample,
    selu,
    shapley_weight,
    smote,
    stratified_split,
    total_effects_table,
    train_mlp,
    true_ate,
)
