import datetime
from collections import namedtuple
from itertools import combinations

ARTIFACT_VERSION = '1'

STUDY_START = datetime.date(2015, 1, 1)
STUDY_DAYS = 365
TRAIN_END_DAY = 240
MAX_HORIZON = 40
DEFAULT_K = 500
DEFAULT_LAMBDA = 1e-3
DEFAULT_LIFT_FRACTION = 0.05
DEFAULT_MIN_QUERIES = 1000
DEFAULT_SEED = 0

US_STATES = ['AL', 'AK', 'AZ', 'AR', 'CA', 'CO', 'CT', 'DE', 'FL', 'GA',
             'HI', 'ID', 'IL', 'IN', 'IA', 'KS', 'KY', 'LA', 'ME', 'MD',
             'MA', 'MI', 'MN', 'MS', 'MO', 'MT', 'NE', 'NV', 'NH', 'NJ',
             'NM', 'NY', 'NC', 'ND', 'OH', 'OK', 'OR', 'PA', 'RI', 'SC',
             'SD', 'TN', 'TX', 'UT', 'VT', 'VA', 'WA', 'WV', 'WI', 'WY']

STATE_NAMES = {
    'ALABAMA': 'AL', 'ALASKA': 'AK', 'ARIZONA': 'AZ', 'ARKANSAS': 'AR', 'CALIFORNIA': 'CA',
    'COLORADO': 'CO', 'CONNECTICUT': 'CT', 'DELAWARE': 'DE', 'FLORIDA': 'FL', 'GEORGIA': 'GA',
    'HAWAII': 'HI', 'IDAHO': 'ID', 'ILLINOIS': 'IL', 'INDIANA': 'IN', 'IOWA': 'IA',
    'KANSAS': 'KS', 'KENTUCKY': 'KY', 'LOUISIANA': 'LA', 'MAINE': 'ME', 'MARYLAND': 'MD',
    'MASSACHUSETTS': 'MA', 'MICHIGAN': 'MI', 'MINNESOTA': 'MN', 'MISSISSIPPI': 'MS', 'MISSOURI': 'MO',
    'MONTANA': 'MT', 'NEBRASKA': 'NE', 'NEVADA': 'NV', 'NEW HAMPSHIRE': 'NH', 'NEW JERSEY': 'NJ',
    'NEW MEXICO': 'NM', 'NEW YORK': 'NY', 'NORTH CAROLINA': 'NC', 'NORTH DAKOTA': 'ND', 'OHIO': 'OH',
    'OKLAHOMA': 'OK', 'OREGON': 'OR', 'PENNSYLVANIA': 'PA', 'RHODE ISLAND': 'RI', 'SOUTH CAROLINA': 'SC',
    'SOUTH DAKOTA': 'SD', 'TENNESSEE': 'TN', 'TEXAS': 'TX', 'UTAH': 'UT', 'VERMONT': 'VT',
    'VIRGINIA': 'VA', 'WASHINGTON': 'WA', 'WEST VIRGINIA': 'WV', 'WISCONSIN': 'WI', 'WYOMING': 'WY',
}

RX = 'RX'
OTC = 'OTC'
UNCLASSIFIED = 'UNCLASSIFIED'
RX_OTC_VALUES = (RX, OTC, UNCLASSIFIED)
RECALL_CLASSES = ('I', 'II', 'III')
NATIONWIDE = 'nationwide'

# Feature layout
SLOPE_WEEKS = tuple(range(1, 8))
RATIO_PAIRS = ((1, 7), (1, 30), (7, 30))
WARMUP_DAYS = 7 * max(SLOPE_WEEKS)
RATIO_ALPHA = 1.0

ATTRIBUTE_NAMES = [f'slope_t_w{k}' for k in SLOPE_WEEKS] \
                  + [f'slope_s_w{k}' for k in SLOPE_WEEKS] \
                  + [f'rt_{s}_{l}' for s, l in RATIO_PAIRS] \
                  + [f'rs_{s}_{l}' for s, l in RATIO_PAIRS]
N_ATTRIBUTES = len(ATTRIBUTE_NAMES)
N_TERMS = 1 + N_ATTRIBUTES + len(list(combinations(range(N_ATTRIBUTES), 2)))

KEY_COLUMNS = ['drug', 'state', 'day']
CUBE_COLUMNS = KEY_COLUMNS + ['total_count', 'symptom_count']
LABEL_COLUMNS = ['label', 'horizon', 'classification', 'rx_otc']

# k-means
KMEANS_MAX_ITER = 100
KMEANS_TOL = 1e-6
MIN_CLUSTER_NEGATIVES = 2

# Evaluation
IMPORTANCE_ALPHA = 0.05
IMPORTANCE_FRACTION = 0.2
LIFT_GRID = [round(0.01 * i, 2) for i in range(1, 101)]
ANALYTICS_DECIMALS = 10

# Artifact file names inside an output directory
QUERY_LOG_FILE = 'queries.jsonl'
RECALL_FILE = 'recalls.jsonl'
DRUG_LEXICON_FILE = 'drugs.csv'
SYMPTOM_LEXICON_FILE = 'symptoms.txt'
CUBE_FILE = 'cube.csv'
INGEST_ERRORS_FILE = 'ingest_errors.jsonl'
FEATURE_FILE = 'features.csv'
LABELED_FILE = 'labeled.csv'
MODEL_FILE = 'model.json'
SCORES_FILE = 'scores.csv'
REPORT_FILE = 'report.json'
ROC_FILE = 'roc.csv'
LIFT_CURVE_FILE = 'lift_curve.csv'
LIFT_VS_N_FILE = 'lift_vs_n.csv'
LIFT_VS_M_FILE = 'lift_vs_m.csv'
STATE_RECALLS_FILE = 'state_recalls.csv'
SWEEP_FILE = 'sweep.json'
TRUTH_FILE = 'truth.json'
SYNTH_CONFIG_FILE = 'synth_config.json'
MANIFEST_FILE = 'manifest.json'
RUN_CONFIG_FILE = 'run_config.json'
CONVERT_ERRORS_FILE = 'convert_errors.jsonl'

# Exit status
ExitStatus = namedtuple('ExitStatus', ['CODE', 'LABEL'])
EXIT_OK = ExitStatus(0, 'OK')
EXIT_FAILURE = ExitStatus(1, 'FAILURE')
EXIT_USAGE = ExitStatus(2, 'USAGE')
