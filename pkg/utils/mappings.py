"""
Saturable Battery Simulator - Presets and Display Mappings

Convert preset names, exit codes and CSV column names to their parameter sets and
human-readable descriptions.
"""

from typing import Any, Dict

# Caption parameters of the published figures. Fig. 3 reuses the drive of Fig. 2 with
# two loss rates; Fig. 4 runs at weak loss and needs a larger truncation.
_FIG2_POINT = {
    'omega': 1.0,
    'detuning': 0.1,
    'chi': 1.0,
    'alpha': 0.5,
    'gamma': 0.2,
}

FIGURE_PRESETS: Dict[str, Dict[str, Any]] = {
    'fig1': {
        'omega': 1.0,
        'chi': 1.0,
        'sweep_param': 'n_s',
        'sweep_values': [round(0.1 * k, 10) for k in range(21)],
        'spectrum_levels': 31,
    },
    'fig2': {
        **_FIG2_POINT,
        'sweep_param': 'n_s',
        'sweep_values': [0.0, 0.3, 0.6, 1.0, 1.5, 3.0],
        'tau_start': 0.0,
        'tau_stop': 100.0,
        'tau_count': 2001,
    },
    'fig3': {
        **_FIG2_POINT,
        'sweep_param': 'n_s',
        'sweep_values': [round(0.15 * k, 10) for k in range(21)],
        'gamma_values': [0.2, 0.4],
        'tau_stop': 100.0,
    },
    'fig4': {
        **_FIG2_POINT,
        'n_s': 1.0,
        'alpha': 0.3,
        'gamma': 0.01,
        'dim': 60,
        'snapshot_times': [0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0],
    },
    'fig5': {
        **_FIG2_POINT,
        'sweep_param': 'n_s',
        'sweep_values': [round(0.15 * k, 10) for k in range(21)],
        'compare_max_energy': True,
    },
}


def get_preset(name: str) -> Dict[str, Any]:
    """Return a copy of a figure preset."""
    key = name.lower()
    if key not in FIGURE_PRESETS:
        raise KeyError(f"Unknown preset '{name}'. Available presets: {sorted(FIGURE_PRESETS)}")
    return dict(FIGURE_PRESETS[key])


def get_exit_code_display(code: int) -> str:
    """Convert a command exit code to a description."""
    exit_code_mapping = {
        0: "Success",
        1: "Configuration error",
        2: "Numerical failure",
        3: "Partial sweep failure",
    }
    return exit_code_mapping.get(code, f"Unknown exit code ({code})")


def get_column_display(column: str) -> str:
    """Describe a CSV column, so that any plotting tool can reproduce the figures."""
    column_mapping = {
        'n': "Fock level index",
        'n_s': "Saturable parameter n_s",
        'gamma': "Loss rate γ",
        'E_n': "Level energy ωn + χn/(1 + n n_s)",
        'E_n_kerr': "Kerr expansion (ω + χ)n − n_sχn² (second-order approximation)",
        'tau': "Charging time τ",
        'energy': "Stored energy E(τ) = tr[h_B ρ(τ)]",
        'ergotropy': "Ergotropy 𝓔(τ) = E(τ) − tr[h_B σ(τ)]",
        'trace_err': "Raw |tr ρ − 1| before renormalization",
        'min_eig': "Smallest eigenvalue of ρ(τ)",
        'purity': "Purity tr ρ²",
        'tau_star': "Time of the maximum stored energy",
        'E_max': "Maximum stored energy max_τ E(τ)",
        'ergotropy_max': "Maximum ergotropy max_τ 𝓔(τ)",
        'interior': "1 when the energy maximum lies strictly inside the time window",
        'tau_power': "Time of the maximum average charging power",
        'power_max': "Maximum average charging power E(τ)/τ",
        'E_ss': "Steady-state energy tr[h_B ρ_ss]",
        'ergotropy_ss': "Steady-state ergotropy",
        'spectral_gap': "Liouvillian gap |Re λ_1|",
        'residual': "‖𝓛ρ_ss‖_F",
        're_beta': "Re β",
        'im_beta': "Im β",
        'W': "Wigner function W(β)",
        'min_W': "Minimum of W over the grid",
        'negative_volume': "Integrated |W| where W < 0",
        'normalization': "Σ W ΔA over the grid",
        'levels_below': "Number of levels with E_n ≤ 25",
        'truncation_delta': "Largest energy change when the truncation grows by check_dim_step",
    }
    return column_mapping.get(column, column)
