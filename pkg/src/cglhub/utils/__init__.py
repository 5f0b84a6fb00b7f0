from .tool import (config_hash, file_sha256, hashed_config, jsonable, write_csv, write_error, write_json,
                   write_run_manifest)
from .schemas import REPORT_FILES, SCHEMAS, validate_report
