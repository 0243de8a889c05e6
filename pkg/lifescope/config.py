"""
LifeScope Configuration Constants
---------------------------------
All tunable defaults for simulation, spectral analysis and rendering.
Edit these values to change system behaviour without touching logic code.
Command-line flags override them per run.
"""

ENGINE_VERSION = "1.0.0"

# ── Placement / Universe ─────────────────────────────────────────────────────
PLACE_MARGIN = 64                    # Dead cells added on every side of a loaded pattern
MAX_UNIVERSE_BYTES = 2 * 1024 ** 3   # Packed-field allocation budget for place()

# ── Analysis Window ──────────────────────────────────────────────────────────
WINDOW_T = 65_536        # Steps recorded per cell (power of two in exact mode)
START_STEP = 0           # Generations simulated and discarded before the window opens
FIT_F_UPPER = 100        # Upper frequency of the log-log fit band [1, f_u]
SECTOR_SIZE = 50         # Cells per sector side

# ── Analysis Mode ────────────────────────────────────────────────────────────
# Options: "exact" | "probe"
ANALYSIS_MODE = "exact"
PROBE_PERIODS = (30, 60)            # Oscillator periods whose harmonics are probed
EXACT_MEMORY_LIMIT = 4 * 1024 ** 3  # Bytes of per-cell series allowed in exact mode
FFT_BATCH_BYTES = 64 * 1024 ** 2    # Working set of one batched rfft call

# ── Classification ───────────────────────────────────────────────────────────
BETA_MAX = -0.2          # Power law needs slope β ≤ BETA_MAX ...
SIGMA2_MAX = 1.5         # ... and residual σ² ≤ SIGMA2_MAX
PEAK_RATIO = 50.0        # Sharp peaks: max S(f≥1) ≥ PEAK_RATIO × median positive S(f≥1)
# Order in which the power-law and sharp-peak clauses are tried
CLASS_ORDER = ("power_law", "sharp_peaks")
# Reject a power-law fit when S(f) over the fitted line passes the sharp-peak test
PEAK_VETO = True

# ── Progress ─────────────────────────────────────────────────────────────────
PROGRESS_EVERY = 1024    # Window steps between progress log lines

# ── Rendering ────────────────────────────────────────────────────────────────
PALETTE = {
    "Null": 230,
    "DcOnly": 230,
    "WhiteNoise": 255,
    "SharpPeaks": 128,
    "PowerLaw": 0,
}
DISTINCT_DC_GRAY = 200   # Gray used for DcOnly with --distinct-dc
MAP_SCALE = 4            # Pixels per sector side in the PGM map

SVG_WIDTH = 800
SVG_HEIGHT = 600
SVG_PLOT_LEFT = 80
SVG_PLOT_RIGHT = 760
SVG_PLOT_TOP = 40
SVG_PLOT_BOTTOM = 540

# ── Benchmark ────────────────────────────────────────────────────────────────
BENCH_SIZES = (1024, 4096)
BENCH_STEPS = 100
BENCH_WORKERS = (1,)

# ── External URM Pattern ─────────────────────────────────────────────────────
URM_NOTES_URL = "http://www.rendell-attic.org/gol/UCM/CMappNotes.html"
URM_PATTERN_FILE = "urm.rle"
URM_PATTERN_SHA256 = None    # Set once a download is verified; None records the hash on first fetch
# Analyzed region of the URM pattern, pattern-relative (x, y, w, h): the top
# 8,000 rows, 3,800 columns centred on the ~3,900-cell width -> 76 x 160 sectors
URM_ROI = (50, 0, 3800, 8000)
NAMED_ROIS = {"urm": URM_ROI}    # Names accepted by analyze --roi
