import logging
import os

DIR = os.path.dirname(__file__)

RANDOM_SEED = 230516
RANDOM_CASES = 1000  # Random sparse-class triples per model in the ring suite
SCALING_FACTORS = (0, 1, 2, 3, 5)
MODEL_SCALING_FACTORS = (2, 3, 5)
MODEL_SCALING_GENERA = (1, 2)
FOURIER_GENERA = (1, 2, 3)
PRODUCT_GENERA = range(2, 7)
SECTIONS_GENERA = range(0, 5)
AST_ROUND_TRIPS = 1000
AST_MAX_DEPTH = 8
MAX_NESTING = 64  # Parentheses, calls and unary minus open at once
MAX_AST_DEPTH = 200

MODEL_DIR = os.path.join(DIR, 'models')
MODEL_SUFFIX = '.chow'

COLOR = os.environ.get('CHOWDR_COLOR', '1').strip().lower() not in ('0', 'no', 'false', 'never', 'off')
LOG_LEVEL = getattr(logging, os.environ.get('CHOWDR_LOG_LEVEL', 'WARNING').upper(), logging.WARNING)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_PARSE_ERROR = 2
EXIT_EVALUATION_ERROR = 3
EXIT_PRECONDITION = 4
