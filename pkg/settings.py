"""
Engine Settings
===============
Environment first. Sane defaults.
"""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

MODES = ('standard', 'paper')


@dataclass(frozen=True)
class EngineSettings:
    mode: str = 'standard'
    workers: int = 0
    seed: int = 20240601
    log_level: str = 'WARNING'
    golden_dir: str = 'golden'

    @classmethod
    def from_env(cls) -> 'EngineSettings':
        """Read settings from the process environment (and .env if present)"""
        load_dotenv()

        mode = os.getenv('JACOBI_MODE', 'standard').strip().lower()
        if mode not in MODES:
            mode = 'standard'

        try:
            workers = max(0, int(os.getenv('JACOBI_WORKERS', '0')))
        except ValueError:
            workers = 0

        try:
            seed = int(os.getenv('JACOBI_SEED', '20240601'))
        except ValueError:
            seed = 20240601

        return cls(
            mode=mode,
            workers=workers,
            seed=seed,
            log_level=os.getenv('JACOBI_LOG_LEVEL', 'WARNING').upper(),
            golden_dir=os.getenv('JACOBI_GOLDEN_DIR', 'golden'),
        )
