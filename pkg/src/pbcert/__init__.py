"""PAC-Bayes generalization-bound certificates.

Computes grid-tuned second-order risk bounds with informed priors,
kl-inversion bounds, and an empirical-variance variant; verifies the
underlying moment inequalities exactly on finite-support distributions;
and ships an experiment harness for synthetic and CSV datasets.
"""

from .bounds import (
    BoundComponents,
    SliceEval,
    EmpiricalBernsteinComponents,
    comp_informed,
    informed_combine,
    irreducible_term_bound,
    main_bound,
    maurer_bound,
    maurer_informed_bound,
    empirical_bernstein_risk_bound,
)
from .datasets import Dataset, SyntheticSpec, gen_synthetic, load_csv, make_folds, split_half
from .esi import (
    DiscreteDistribution,
    EsiCheckResult,
    check_esi_chain,
    check_grid_mixture,
    check_pac_bayes_esi,
    check_standard_bernstein,
    check_unexpected_bernstein,
    empirical_bernstein_mean_bound,
    esi_mgf,
    find_tightness_witness,
)
from .experiments import (
    BoundReport,
    ExperimentConfig,
    emit_report,
    run_experiment,
    run_kfold,
    run_sweep,
    sweep_summary,
)
from .learners import Hypothesis, TrainOptions, sigmoid, train_logistic, zero_one_loss
from .posteriors import (
    IsotropicGaussian,
    McConfig,
    mc_expected_loss,
    mc_vn,
    sample_hypotheses,
    vn_prime,
)
from .scalar import (
    EtaGrid,
    EmpiricalBernsteinConstants,
    binary_kl,
    build_eta_grid,
    build_mean_grid,
    c_eta,
    gaussian_kl,
    invert_kl_upper,
    kappa,
    relaxed_kl_upper,
    s_eta,
    theta,
    empirical_bernstein_constants,
)

__version__ = "0.1.0"
