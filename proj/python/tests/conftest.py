#
# Copyright 2026 The secfl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

import os
import sys

# In the build tree the extension and the package live in different places.
_ext = os.environ.get("SECFL_EXT_DIR")
if _ext:
    sys.path.insert(0, _ext)
    sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))
