# Copyright 2026 The secfl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Python bindings for the secfl simulator."""

import json

try:
    from . import _secfl
except ImportError:  # build tree: extension sits on sys.path by itself
    import _secfl

ConfigError = _secfl.ConfigError
accountant = _secfl.accountant
eps_for_delta = _secfl.eps_for_delta
gdp_to_dp_delta = _secfl.gdp_to_dp_delta
mu_client_level = _secfl.mu_client_level
mu_record_clients_only = _secfl.mu_record_clients_only
mu_record_server_corrupted = _secfl.mu_record_server_corrupted
normalize_config = _secfl.normalize_config
robustness_bounds = _secfl.robustness_bounds
simulate = _secfl.simulate
validate_bench = _secfl.validate_bench


def run(config=None, out=None):
    """Runs an experiment from a dict (or JSON string) and returns mean rows."""
    if config is None:
        config = {}
    text = config if isinstance(config, str) else json.dumps(config)
    return _secfl.simulate(text, out)
