"""Rock type identification at the drilling bit from surface drilling telemetry.

Preprocessing of raw MWD files onto a 0.1 m depth grid, feature engineering
(including windowed identification of a bit-rock interaction model),
logistic / boosted-tree / feed-forward classifiers, and leave-one-well-out
evaluation with length-weighted accuracy, ROC AUC and PR AUC.
"""

from .core import (BIN_SIZE, CHANNELS, ChannelId, ConfigError, DataError, DepthGrid, LabeledBins,
                   RocktypeError, TrainingError, WellFrame, class_share)
from .evaluation import (accuracy_l, evaluate_cv, greedy_select, grid_search, lowo_folds, pr_auc,
                         roc_auc)
from .features import FeatureMatrix, FeatureSpec, assemble_matrix, compute_apr, compute_sed
from .models import fit_gbdt, fit_logistic, fit_mlp, fit_model, load_model, predict_proba, save_model
from .synth import SynthWellSpec, gen_benchmark

__version__ = "0.1.0"
