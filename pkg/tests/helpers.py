"""Independent oracles and random draws used across the test modules."""

import csv
from pathlib import Path
from typing import Dict, List

import numpy as np

from core.model import ModelParams

FIG2 = dict(omega=1.0, detuning=0.1, chi=1.0, alpha=0.5, gamma=0.2)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def random_state(rng: np.random.Generator, n: int, rank: int = None) -> np.ndarray:
    rank = rank or n
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def linear_amplitude(p: ModelParams, tau):
    """Coherent amplitude of the driven, damped linear oscillator started in vacuum."""
    z = 1j * p.detuning + p.gamma / 2
    return -1j * p.alpha * (1 - np.exp(-z * np.asarray(tau))) / z


def linear_steady_amplitude(p: ModelParams) -> complex:
    return -1j * p.alpha / (1j * p.detuning + p.gamma / 2)


def read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
