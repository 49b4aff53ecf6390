"""Configuration management for the Engel toolkit."""

import copy
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

# lighter search budgets kept in the search section under these prefixes
SEARCH_PROFILE_PREFIXES = ('suite_', 'path_')


class EngelConfig:
    """Configuration loader and manager for numerics, search and experiments."""

    def __init__(self, config_path: Optional[str] = None, runtime_config: Optional[Dict[str, Any]] = None):
        """Initialize configuration from YAML file and optional runtime config."""
        load_dotenv()
        if config_path is None:
            # ENGEL_CONFIG wins, then config.yaml in the project root
            config_path = os.getenv("ENGEL_CONFIG") or Path(__file__).parent.parent.parent / "config.yaml"

        self.config_path = Path(config_path)
        self.config = self._load_config()

        # Merge runtime configuration if provided
        self.runtime_config = runtime_config or {}
        self._merge_runtime_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file."""
        defaults = self._get_default_config()
        if not self.config_path.exists():
            return defaults

        try:
            with open(self.config_path, 'r') as f:
                loaded = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"Invalid YAML configuration: {e}")
        if not isinstance(loaded, dict):
            raise ValueError(f"Configuration root must be a mapping, got {type(loaded).__name__}")
        for section, values in loaded.items():
            if isinstance(values, dict) and isinstance(defaults.get(section), dict):
                defaults[section].update(values)
            else:
                defaults[section] = values
        return defaults

    def _get_default_config(self) -> Dict[str, Any]:
        """Get default configuration when no YAML file exists."""
        return copy.deepcopy({
            'numerics': {
                'float_tolerance': 1e-9,
                'min_circle_samples': 64,
                'rank_retries': 5,
            },
            'obstacles': {
                'epsilon': '1/2',
            },
            'avoidance': {
                'radial_levels': 16,
                'angular_samples': 64,
                'refinements': 2,
            },
            'search': {
                'degree': 4,
                'restarts': 16,
                'max_iterations': 400,
                'shrink_tolerance': 1e-6,
                'coefficient_scale': 0.25,
                'max_lambda': 1048576.0,
                'suite_degree': 2,
                'suite_restarts': 2,
                'suite_max_iterations': 60,
                'path_degree': 1,
                'path_restarts': 1,
                'path_max_iterations': 24,
            },
            'quadrature': {
                'nodes': 128,
            },
            'experiments': {
                'seed': 42,
                'remark_samples': 100,
                'lemma_samples': 1000,
                'prolongation_samples': 50,
                'pullback_samples': 50,
                'steering_samples': 100,
                'finsler_samples': 10,
                'wline_samples': 100,
                'shell_samples': 1000,
                'axiom_samples': 200,
            },
            'logging': {
                'level': 'INFO',
            },
        })

    def _merge_runtime_config(self):
        """Merge runtime configuration with static configuration."""
        if not self.runtime_config:
            return

        # Map runtime config keys to internal config structure
        runtime_mappings = {
            # Numerics
            'float_tolerance': ('numerics', 'float_tolerance'),
            'min_circle_samples': ('numerics', 'min_circle_samples'),
            'rank_retries': ('numerics', 'rank_retries'),

            # Obstacles
            'epsilon': ('obstacles', 'epsilon'),

            # Avoidance certification
            'radial_levels': ('avoidance', 'radial_levels'),
            'angular_samples': ('avoidance', 'angular_samples'),
            'refinements': ('avoidance', 'refinements'),

            # Search
            'degree': ('search', 'degree'),
            'restarts': ('search', 'restarts'),
            'max_iterations': ('search', 'max_iterations'),
            'shrink_tolerance': ('search', 'shrink_tolerance'),
            'coefficient_scale': ('search', 'coefficient_scale'),
            'max_lambda': ('search', 'max_lambda'),
            'suite_degree': ('search', 'suite_degree'),
            'suite_restarts': ('search', 'suite_restarts'),
            'suite_max_iterations': ('search', 'suite_max_iterations'),
            'path_degree': ('search', 'path_degree'),
            'path_restarts': ('search', 'path_restarts'),
            'path_max_iterations': ('search', 'path_max_iterations'),

            # Quadrature
            'quadrature_nodes': ('quadrature', 'nodes'),

            # Experiments
            'seed': ('experiments', 'seed'),
            'samples': ('experiments', 'lemma_samples'),

            # Logging
            'log_level': ('logging', 'level'),
        }

        # Apply runtime config overrides
        for runtime_key, value in self.runtime_config.items():
            if value is None:
                continue
            if runtime_key in runtime_mappings:
                self._set_nested_config(runtime_mappings[runtime_key], value)
            elif runtime_key.endswith('_samples'):
                self._set_nested_config(('experiments', runtime_key), value)

    def _set_nested_config(self, config_path: tuple, value: Any):
        """Set a nested configuration value."""
        current = self.config
        for key in config_path[:-1]:
            if key not in current:
                current[key] = {}
            current = current[key]
        current[config_path[-1]] = value

    @classmethod
    def from_runtime_config(cls, runtime_config: Dict[str, Any]) -> 'EngelConfig':
        """Create EngelConfig instance from runtime configuration."""
        return cls(runtime_config=runtime_config)

    # Numerics
    def get_float_tolerance(self) -> float:
        """Get the relative tolerance for float modulus equalities."""
        return float(self.config.get('numerics', {}).get('float_tolerance', 1e-9))

    def get_min_circle_samples(self) -> int:
        """Get the minimum number of samples on a circle."""
        return int(self.config.get('numerics', {}).get('min_circle_samples', 64))

    def get_rank_retries(self) -> int:
        """Get the number of fresh points tried by generic rank."""
        return int(self.config.get('numerics', {}).get('rank_retries', 5))

    # Obstacles
    def get_epsilon(self) -> Fraction:
        """Get the annulus half-width used for K3 shells."""
        return Fraction(str(self.config.get('obstacles', {}).get('epsilon', '1/2')))

    # Avoidance
    def get_avoidance_settings(self) -> Dict[str, int]:
        """Get grid resolution for disc avoidance certification."""
        section = self.config.get('avoidance', {})
        return {
            'radial_levels': int(section.get('radial_levels', 16)),
            'angular_samples': int(section.get('angular_samples', 64)),
            'refinements': int(section.get('refinements', 2)),
        }

    # Search
    def get_search_settings(self, profile: Optional[str] = None) -> Dict[str, Any]:
        """Get extremal disc search defaults, overlaid with a profile's `<profile>_` keys."""
        section = self.config.get('search', {})
        settings = {k: v for k, v in section.items() if not k.startswith(SEARCH_PROFILE_PREFIXES)}
        if profile is not None:
            prefix = f'{profile}_'
            settings.update({k[len(prefix):]: v for k, v in section.items() if k.startswith(prefix)})
        return settings

    def get_quadrature_nodes(self) -> int:
        """Get the number of Simpson intervals along a path segment."""
        return int(self.config.get('quadrature', {}).get('nodes', 128))

    # Experiments
    def get_seed(self) -> int:
        """Get the master seed for experiment suites."""
        return int(self.config.get('experiments', {}).get('seed', 42))

    def get_sample_count(self, suite: str) -> int:
        """Get the sample count for a named suite."""
        return int(self.config.get('experiments', {}).get(f'{suite}_samples', 100))

    def get_log_level(self) -> str:
        """Get the logging level, ENGEL_LOG_LEVEL taking precedence."""
        return os.getenv('ENGEL_LOG_LEVEL') or str(self.config.get('logging', {}).get('level', 'INFO'))

    def validate_configuration(self) -> Dict[str, bool]:
        """Validate the current configuration."""
        epsilon = self.get_epsilon()
        search = self.get_search_settings()
        avoidance = self.get_avoidance_settings()
        validation_results = {
            'float_tolerance_positive': self.get_float_tolerance() > 0,
            'circle_samples_valid': self.get_min_circle_samples() >= 8,
            'epsilon_in_range': Fraction(0) < epsilon <= Fraction(1, 2),
            'search_positive': all(float(search.get(key, 1)) > 0 for key in (
                'degree', 'restarts', 'max_iterations', 'shrink_tolerance', 'coefficient_scale', 'max_lambda')),
            'avoidance_positive': all(value > 0 for value in avoidance.values()),
            'quadrature_even': self.get_quadrature_nodes() > 0 and self.get_quadrature_nodes() % 2 == 0,
        }
        return validation_results

    def get_config_summary(self) -> str:
        """Get a human-readable summary of the current configuration."""
        try:
            validation = self.validate_configuration()
            search = self.get_search_settings()
            summary = f"""
Engel Toolkit Configuration Summary:
====================================
Config File: {self.config_path}
Float Tolerance: {self.get_float_tolerance()}
K3 Epsilon: {self.get_epsilon()}
Search: degree {search.get('degree')}, restarts {search.get('restarts')}, iterations {search.get('max_iterations')}
Quadrature Nodes: {self.get_quadrature_nodes()}
Seed: {self.get_seed()}

Configuration Status: {'Valid' if all(validation.values()) else 'Invalid'}
"""
            return summary.strip()
        except Exception as e:
            return f"Configuration Error: {e}"


# Global config instance
_config_instance = None

def get_config() -> EngelConfig:
    """Get the global configuration instance."""
    global _config_instance
    if _config_instance is None:
        _config_instance = EngelConfig()
    return _config_instance

def reload_config(runtime_config: Optional[Dict[str, Any]] = None) -> EngelConfig:
    """Reload the configuration from file."""
    global _config_instance
    _config_instance = EngelConfig(runtime_config=runtime_config)
    return _config_instance
