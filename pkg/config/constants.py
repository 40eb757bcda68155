"""
Application Constants

Default values shared by mining, training, evaluation and analysis.
"""

# Constraint Mining
DEFAULT_SEED_COUNT = 1000  # Top-N English words used as seeds
DEFAULT_FREQUENCY_CUTOFF = 15000  # Top-k words kept per language
DEFAULT_GLOSS_LANGUAGE_PRIORITY = ["en"]  # Scanned first, then dump order
FREQUENCY_FILE_SUFFIX = ".freq"

# Constraint file columns (TSV)
CONSTRAINT_COLUMNS = [
    "w1",
    "l1",
    "w2",
    "l2",
    "g1",
    "gl1",
    "g2",
    "gl2",
    "synset_id"
]

# Language-pair sampling
DEFAULT_ALPHA = 0.5  # Smoothing exponent of the language-pair distribution
DEFAULT_BATCH_SIZE = 32
DISTRIBUTION_TOLERANCE = 1e-12

# Encoder
SPEC1_TOKEN = "[SPEC1]"
SPEC2_TOKEN = "[SPEC2]"
UNK_TOKEN = "[UNK]"
RESERVED_TOKENS = [SPEC1_TOKEN, SPEC2_TOKEN, UNK_TOKEN]  # ids 0, 1, 2
CONTINUATION_PREFIX = "##"
DEFAULT_DIM = 48
DEFAULT_NUM_LAYERS = 2
DEFAULT_FFN_DIM = 96
ADAPTER_REDUCTION_RATIO = 16  # bottleneck = ceil(dim / 16)
DEFAULT_MAX_SEQUENCE_LENGTH = 64
INIT_RANGE = 0.05  # uniform(-0.05, 0.05)

# Checkpoint layout
CHECKPOINT_MANIFEST = "manifest.json"
CHECKPOINT_WEIGHTS = "weights.bin"
CHECKPOINT_CONFIG = "config.json"
CHECKPOINT_VOCAB = "vocab.txt"

# Contrastive objective
DEFAULT_TAU = 0.07
POSITIVE_PAIR_MODES = ["all", "cross_slot"]

# Optimizer (AdamW)
DEFAULT_LEARNING_RATE = 2e-5
LEARNING_RATE_GRID = [2e-5, 5e-6, 1e-6]
ADAPTER_LEARNING_RATE_GRID = [2e-5, 5e-6, 1e-6, 1e-4]
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPS = 1e-8
DEFAULT_WEIGHT_DECAY = 0.01
DEFAULT_EPOCHS = 15

# Validation
VALIDATION_EVENTS_PER_EPOCH = 4  # Quarter-epoch cadence
DEFAULT_VALIDATION_SETS = 4

# Gradient checking
DEFAULT_FD_STEP = 1e-5
FD_DENOMINATOR_FLOOR = 1e-8

# Evaluation tasks
EVAL_TASKS = ["bli", "xlsim", "retrieval"]
TRAINING_MODES = ["full", "adapter"]

# Reports
RESOURCE_RUN_CONFIG = "resolved_config.json"
TRAINING_LOG = "training_log.jsonl"
BEST_CHECKPOINT_DIR = "best_checkpoint"

# CLI exit codes
EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
