// Copyright 2026 The relbc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef RELBC_RELBC_HPP
#define RELBC_RELBC_HPP

#include "relbc/adversary.hpp"
#include "relbc/bounds.hpp"
#include "relbc/cli.hpp"
#include "relbc/common.hpp"
#include "relbc/config.hpp"
#include "relbc/exact.hpp"
#include "relbc/netsim.hpp"
#include "relbc/noise.hpp"
#include "relbc/projectors.hpp"
#include "relbc/protocol.hpp"
#include "relbc/quantum.hpp"
#include "relbc/spacetime.hpp"
#include "relbc/spectral.hpp"

#endif  // RELBC_RELBC_HPP
