import sys
from pathlib import Path
from datetime import datetime
import json

sys.path.insert(0, str(Path(__file__).parent.parent))

import numpy as np

from Config import Config
from src.diffusion.kernels import diffuse_item_tag, diffuse_user_item, initial_vector
from src.diffusion.oracle import DenseOracle
from src.graph.tripartite import TripartiteGraph
from src.utils.errors import ConfigError


class HealthChecker:
    #System health checker

    def __init__(self):
        self.results = {
            'timestamp': datetime.now().isoformat(),
            'overall_status': 'healthy',
            'checks': {}
        }

    def check_config(self):
        #Check env-driven settings
        try:
            Config.validate()
            self.results['checks']['config'] = {
                'status': 'healthy',
                'data_dir': str(Config.DATA_DIR),
                'log_level': Config.LOG_LEVEL,
                'workers': Config.WORKERS,
            }
            return True
        except ConfigError as e:
            self.results['checks']['config'] = {
                'status': 'unhealthy',
                'error': str(e)
            }
            self.results['overall_status'] = 'unhealthy'
            return False

    def check_kernels(self):
        #Sparse kernels against the dense reference on a toy graph
        try:
            graph = TripartiteGraph.from_adjacency(
                {'u1': ['a', 'b'], 'u2': ['b', 'c'], 'u3': ['a', 'c', 'd']},
                {'a': ['x'], 'b': ['x', 'y'], 'c': ['y'], 'd': ['y', 'z']},
            )
            oracle = DenseOracle(graph)
            error = 0.0
            for user in range(graph.n):
                f = initial_vector(graph, user)
                error = max(
                    error,
                    float(np.max(np.abs(diffuse_user_item(graph, f).vector - oracle.diffuse_user_item(f)))),
                    float(np.max(np.abs(diffuse_item_tag(graph, f).vector - oracle.diffuse_item_tag(f)))),
                )
            status = 'healthy' if error <= 1e-12 else 'unhealthy'
            self.results['checks']['kernels'] = {'status': status, 'max_abs_error': error}
            if status != 'healthy':
                self.results['overall_status'] = 'unhealthy'
            return status == 'healthy'
        except Exception as e:
            self.results['checks']['kernels'] = {
                'status': 'unhealthy',
                'error': str(e)
            }
            self.results['overall_status'] = 'unhealthy'
            return False

    def check_logs(self):
        #Check log files
        try:
            log_file = Config.LOG_FILE
            activity_log = Config.ACTIVITY_LOG

            log_age = None
            if log_file.exists():
                log_mtime = datetime.fromtimestamp(log_file.stat().st_mtime)
                log_age = (datetime.now() - log_mtime).total_seconds() / 3600

            log_size = log_file.stat().st_size if log_file.exists() else 0
            activity_size = activity_log.stat().st_size if activity_log.exists() else 0

            status = 'healthy'
            if not log_file.exists() or not activity_log.exists():
                status = 'warning'

            self.results['checks']['logs'] = {
                'status': status,
                'log_size_mb': round(log_size / 1024 / 1024, 2),
                'activity_log_size_mb': round(activity_size / 1024 / 1024, 2),
                'log_age_hours': round(log_age, 1) if log_age else None
            }

            return status == 'healthy'
        except Exception as e:
            self.results['checks']['logs'] = {
                'status': 'unhealthy',
                'error': str(e)
            }
            return False

    def check_disk_space(self):
        #Sweeps write one file per metric and list length
        try:
            import shutil
            Config.DATA_DIR.mkdir(parents=True, exist_ok=True)
            total, used, free = shutil.disk_usage(Config.DATA_DIR)
            free_gb = free // (2**30)
            free_pct = (free / total) * 100

            status = 'healthy'
            if free_pct < 10:
                status = 'critical'
                self.results['overall_status'] = 'unhealthy'
            elif free_pct < 20:
                status = 'warning'

            self.results['checks']['disk_space'] = {
                'status': status,
                'free_gb': free_gb,
                'free_percent': round(free_pct, 1)
            }

            return status != 'critical'
        except Exception as e:
            self.results['checks']['disk_space'] = {
                'status': 'unknown',
                'error': str(e)
            }
            return True

    def run_all_checks(self, output=sys.stdout):
        #Run all health checks
        print("=" * 60, file=output)
        print("SYSTEM HEALTH CHECK", file=output)
        print(f"Time: {self.results['timestamp']}", file=output)
        print("=" * 60, file=output)

        checks = [
            ("Config", self.check_config),
            ("Kernels", self.check_kernels),
            ("Logs", self.check_logs),
            ("Disk Space", self.check_disk_space),
        ]

        for name, check_func in checks:
            print(f"\nChecking {name}...", end=" ", file=output)
            try:
                check_func()
                status = self.results['checks'][name.lower().replace(' ', '_')]['status']
                print(status.upper(), file=output)
            except Exception as e:
                print(f"ERROR: {e}", file=output)
                self.results['overall_status'] = 'unhealthy'

        print("\n" + "=" * 60, file=output)
        print(f"OVERALL STATUS: {self.results['overall_status'].upper()}", file=output)
        print("=" * 60, file=output)
        print(json.dumps(self.results, indent=2), file=output)

        Config.DATA_DIR.mkdir(parents=True, exist_ok=True)
        health_file = Config.DATA_DIR / 'health_check.json'
        with open(health_file, 'w') as f:
            json.dump(self.results, f, indent=2)

        return self.results['overall_status'] == 'healthy'


def main():
    #Run health check
    checker = HealthChecker()
    is_healthy = checker.run_all_checks()

    sys.exit(0 if is_healthy else 1)


if __name__ == "__main__":
    main()
