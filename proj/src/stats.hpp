// Copyright 2026 The Intentsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INTENTSYNTH_STATS_HPP
#define INTENTSYNTH_STATS_HPP

#include <cstddef>
#include <span>

namespace intentsynth {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Upper-tail probability P(T > t) for Student's t with df degrees of freedom.
// t == 0 returns exactly 0.5; +/-infinity return 0 and 1.
double student_t_sf(double t, double df);

double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);  // n-1 denominator; 0 if n < 2

}  // namespace intentsynth

#endif  // INTENTSYNTH_STATS_HPP
