import logging
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Logging Configuration (optional from .env)
LOG_LEVEL = os.getenv('SMACOF_LOG_LEVEL', 'WARNING').upper()
LOG_DIR = os.getenv('SMACOF_LOG_DIR')

# Fixture data shipped with the repository
DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')

# Random start
DEFAULT_SEED = 20250101

# Benchmark
BENCH_REPETITIONS = 100

# Symmetric linear algebra
JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100
PIVOT_TOLERANCE = 1e-12
# Relative size below which an eigenvalue of a spectral start counts as zero
EIGEN_ZERO = 1e-10

# Plot canvas: 8in x 100dpi = 800 x 800 units
PLOT_SIZE_INCHES = 8.0
PLOT_DPI = 100
SVG_HASH_SALT = 'smacof-flat'

# Fixed colour table for plot arguments (names are case-insensitive)
PALETTE = {
    'BLACK': '#000000',
    'WHITE': '#FFFFFF',
    'RED': '#FF0000',
    'GREEN': '#008000',
    'BLUE': '#0000FF',
    'CYAN': '#00FFFF',
    'MAGENTA': '#FF00FF',
    'YELLOW': '#FFFF00',
    'GRAY': '#808080',
    'ORANGE': '#FFA500',
    'PURPLE': '#800080',
    'BROWN': '#A52A2A',
    'PINK': '#FFC0CB',
    'NAVY': '#000080',
    'OLIVE': '#808000',
    'MAROON': '#800000',
}

# Validate logging configuration
if not isinstance(logging.getLevelName(LOG_LEVEL), int):
    print(f"WARNING: Unknown SMACOF_LOG_LEVEL '{LOG_LEVEL}' in environment, falling back to WARNING")
    LOG_LEVEL = 'WARNING'

if LOG_DIR is not None and not LOG_DIR.strip():
    LOG_DIR = None
