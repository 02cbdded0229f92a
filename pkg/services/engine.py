import logging
import time
from contextlib import contextmanager
from dataclasses import replace
from typing import Dict, Optional

import numpy as np

from models import EngineConfig, MDSData, MDSResult
from services.errors import EngineError, MDSDataError, ReducibleWeightsError
from services.initial import torgerson
from services.majorize import build_b, distances, guttman_step, stress
from services.mds_data import matrix_print, validate
from services.monotone import TIE_APPROACHES, TransformState, normalize_dhat
from services.symlinalg import build_v, check_irreducible, mp_inverse_v

logger = logging.getLogger(__name__)


class PhaseTimer:
    """Accumulates wall-clock seconds spent in the setup, X and delta phases of a run"""

    PHASES = ("setup", "xphase", "dphase")

    def __init__(self):
        self.totals: Dict[str, float] = {name: 0.0 for name in self.PHASES}

    @contextmanager
    def phase(self, name: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.totals[name] += time.perf_counter() - start


def iteration_line(t: int, sigma: float, digits: int = 10, width: int = 12) -> str:
    return f"itel {t:4d} stress {sigma:{width}.{digits}f}"


class SmacofEngine:
    """
    Alternating least squares driver for square symmetric MDS.

    Each iteration makes one Guttman transform for fixed disparities and then, in
    ordinal runs, computes the conditionally optimal normalized disparities with
    the configured approach to ties.
    """

    def __init__(self, config: Optional[EngineConfig] = None):
        self.config = config or EngineConfig()

    def _check_data(self, data: MDSData):
        violations = validate(data)
        if violations:
            raise MDSDataError(f"invalid MDS data: {'; '.join(violations)}")
        components = check_irreducible(data)
        if components is not None:
            raise ReducibleWeightsError(
                f"observations split the objects into {len(components)} unconnected groups: {components}",
                components,
            )

    def _start(self, data: MDSData, xinit) -> np.ndarray:
        p = self.config.ndim
        if xinit is None:
            x = np.asarray(torgerson(data, p).conf)
        else:
            x = np.array(xinit, dtype=float)
            if x.shape != (data.nobj, p):
                raise EngineError(f"xinit has shape {x.shape}, expected ({data.nobj}, {p})")
        if not np.all(np.isfinite(x)):
            raise EngineError("initial configuration contains non-finite values")
        return x - x.mean(axis=0)

    def run(self, data: MDSData, xinit=None, timer: Optional[PhaseTimer] = None) -> MDSResult:
        """
        Minimize stress from xinit (Torgerson start when None).

        Raises:
            MDSDataError: invalid data or reducible weights.
            EngineError: xinit of the wrong shape or a non-finite stress value.
        """
        cfg = self.config
        timer = timer or PhaseTimer()
        n, m = data.nobj, data.ndat
        logger.info(
            f"Starting run: n={n} m={m} ndim={cfg.ndim} weighted={cfg.weighted} "
            f"ordinal={cfg.ordinal} ties={cfg.ties} itmax={cfg.itmax} eps={cfg.eps}"
        )

        with timer.phase("setup"):
            self._check_data(data)
            weights = np.asarray(data.weights, dtype=float) if cfg.weighted else np.ones(m)
            x = self._start(data, xinit)
            xinit = x.copy()

            state = normalize_dhat(TransformState(
                dhat=np.asarray(data.delta, dtype=float),
                dist=distances(x, data.iind, data.jind),
                iind=np.asarray(data.iind),
                jind=np.asarray(data.jind),
                weights=weights,
                blocks=np.asarray(data.blocks),
            ))

            # the 1/n shortcut is only a majorization for complete unit-weight data
            vinv = None
            if cfg.weighted or m < n * (n - 1) // 2:
                vinv = mp_inverse_v(build_v(data.model_copy(update={"weights": weights.tolist()})))
            approach = TIE_APPROACHES[cfg.ties] if cfg.ordinal else None

        sigma = stress(state.dhat, state.dist, state.weights)
        logger.debug(f"Initial stress {sigma:.12f}")
        niter = 0
        for t in range(1, cfg.itmax + 1):
            with timer.phase("xphase"):
                b = build_b(state.dhat, state.dist, state.weights, state.iind, state.jind, n)
                x = guttman_step(x, b, vinv)
                dist = distances(x, state.iind, state.jind)
            if approach is not None:
                with timer.phase("dphase"):
                    state = approach(state, dist)
            else:
                state = replace(state, dist=dist)

            sigma_new = stress(state.dhat, state.dist, state.weights)
            if not np.isfinite(sigma_new):
                raise EngineError(f"stress became non-finite at iteration {t}")
            if cfg.verbose:
                print(iteration_line(t, sigma_new, cfg.digits, cfg.width))
            niter = t
            converged = sigma - sigma_new < cfg.eps
            sigma = sigma_new
            if converged:
                break

        confdist = distances(x, state.iind, state.jind)
        final = stress(state.dhat, confdist, state.weights)
        logger.info(f"Finished after {niter} iterations with stress {final:.10f}")
        if cfg.verbose:
            print(matrix_print(x, digits=cfg.digits, width=cfg.width))

        return MDSResult(
            delta=data.delta,
            dhat=state.dhat.tolist(),
            confdist=confdist.tolist(),
            conf=x.tolist(),
            weightmat=state.weights.tolist(),
            stress=final,
            ndim=cfg.ndim,
            init=xinit.tolist(),
            niter=niter,
            nobj=n,
            iind=state.iind.tolist(),
            jind=state.jind.tolist(),
            weighted=cfg.weighted,
            ordinal=cfg.ordinal,
            ties=cfg.ties,
        )


def run(data: MDSData, config: Optional[EngineConfig] = None, xinit=None, timer: Optional[PhaseTimer] = None) -> MDSResult:
    return SmacofEngine(config).run(data, xinit=xinit, timer=timer)
