"""tensorpoly: polynomial function learning via rank-one tensor terms."""

from .model import (
    Dataset,
    DenseTensor,
    LtrModel,
    forward_batch,
    forward_partial,
    forward_scalar,
    homogenize,
    materialize_tensor,
    predict,
    tensor_contract,
)
from .training import (
    AdamState,
    FitReport,
    TrainConfig,
    TrainingDivergedError,
    adam_step,
    fit,
    fit_joint,
    fit_layered,
    fit_logistic,
    fit_rank_one,
    fit_rankwise,
    gradients,
    loss,
)
from .datagen import GeneratorSpec, generate_model, sample_dataset, quadratics_dataset
from .metrics import (
    CvPlan,
    correlation_ratio,
    cross_validate,
    f1_multilabel,
    make_cv_plan,
    pearson,
    rmse,
)
from .baselines import (
    KrrModel,
    anova_terms,
    fm_fit_gd,
    fm_forward,
    krr_fit,
    krr_predict,
    linreg_fit,
    linreg_predict,
    poly_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "CvPlan",
    "Dataset",
    "DenseTensor",
    "FitReport",
    "GeneratorSpec",
    "KrrModel",
    "LtrModel",
    "TrainConfig",
    "TrainingDivergedError",
    "adam_step",
    "anova_terms",
    "correlation_ratio",
    "cross_validate",
    "f1_multilabel",
    "fit",
    "fit_joint",
    "fit_layered",
    "fit_logistic",
    "fit_rank_one",
    "fit_rankwise",
    "fm_fit_gd",
    "fm_forward",
    "forward_batch",
    "forward_partial",
    "forward_scalar",
    "generate_model",
    "gradients",
    "homogenize",
    "krr_fit",
    "krr_predict",
    "linreg_fit",
    "linreg_predict",
    "loss",
    "make_cv_plan",
    "materialize_tensor",
    "pearson",
    "poly_kernel",
    "predict",
    "rmse",
    "sample_dataset",
    "quadratics_dataset",
    "tensor_contract",
]
