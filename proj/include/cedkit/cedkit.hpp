/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#pragma once

#include <string_view>

#include "cedkit/core.hpp"
#include "cedkit/dataset.hpp"
#include "cedkit/eval.hpp"
#include "cedkit/fsm.hpp"
#include "cedkit/io.hpp"
#include "cedkit/probfsm.hpp"
#include "cedkit/rng.hpp"
#include "cedkit/simulator.hpp"

namespace cedkit {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace cedkit
