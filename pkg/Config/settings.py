import os
from pathlib import Path
from dotenv import load_dotenv

#Load env variables

load_dotenv()


def _env_int(key, default):
    #malformed values surface through validate(), not at import
    try:
        return int(os.getenv(key, default))
    except ValueError:
        return None


class Config:
    #PATHS
    BASE_DIR = Path(__file__).parent.parent
    DATA_DIR = Path(os.getenv('TAGDIFF_DATA_DIR', str(BASE_DIR / 'data')))
    LOGS_DIR = DATA_DIR / 'logs'
    OUTPUT_DIR = DATA_DIR / 'sweeps'

    #EXECUTION - never changes results, only how fast they arrive
    WORKERS = _env_int('TAGDIFF_WORKERS', '1')
    ORACLE_MAX_ITEMS = _env_int('TAGDIFF_ORACLE_MAX_ITEMS', '2000')
    PROGRESS = os.getenv('TAGDIFF_PROGRESS', 'off').lower() in ('1', 'on', 'true', 'yes')

    #LOGGING CONFIGURATIONS
    LOG_FILE = LOGS_DIR / 'tagdiff.log'
    ACTIVITY_LOG = LOGS_DIR / 'activity.csv'
    LOG_LEVEL = os.getenv('TAGDIFF_LOG_LEVEL', 'INFO')

    @classmethod
    def validate(cls):
        #validating configuration ranges, reported all at once
        from src.utils.errors import ConfigError

        invalid = []
        if cls.WORKERS is None or cls.WORKERS < 1:
            invalid.append('TAGDIFF_WORKERS')
        if cls.ORACLE_MAX_ITEMS is None or cls.ORACLE_MAX_ITEMS < 1:
            invalid.append('TAGDIFF_ORACLE_MAX_ITEMS')
        if cls.LOG_LEVEL.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            invalid.append('TAGDIFF_LOG_LEVEL')
        if invalid:
            raise ConfigError(f"Invalid config: {','.join(invalid)}")
