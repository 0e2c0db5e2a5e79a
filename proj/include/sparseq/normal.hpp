/*
 * Copyright 2026 The sparseq authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SPARSEQ_NORMAL_HPP
#define SPARSEQ_NORMAL_HPP

namespace sparseq {

// Standard normal quantile function (inverse CDF) via Wichura's AS 241
// PPND16 rational approximations. Absolute error below 1e-8 on
// (1e-9, 1 - 1e-9), far better over most of the range.
// Throws DomainError for p outside (0, 1).
double normal_quantile(double p);

double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace sparseq

#endif  // SPARSEQ_NORMAL_HPP
