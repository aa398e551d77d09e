/* Copyright 2026 The bellforge authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the bellforge library. All functions return a bf_status;
 * on failure bf_last_error() holds a message for the calling thread.
 * Strings returned through char** out-parameters are heap-allocated and
 * must be released with bf_string_free(). */

#ifndef BELLFORGE_H
#define BELLFORGE_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bf_status {
    BF_OK = 0,
    BF_ERR_USAGE = 2,  /* invalid arguments or out-of-region parameters */
    BF_ERR_VERIFY = 3, /* a verification precondition failed */
    BF_ERR_SOLVER = 4  /* numeric solver failure */
} bf_status;

/* Opaque family instance: Bell expression, ideal realization, certificate. */
typedef struct bf_family bf_family;

const char* bf_version(void);
const char* bf_last_error(void);
void bf_string_free(char* s);

/* Newline-separated list of recognized family kind names. */
bf_status bf_family_kinds(char** out);

/* Builds a family instance from (key, value) parameter pairs. */
bf_status bf_family_build(const char* kind, const char* const* keys, const double* values,
                          int nparams, bf_family** out);
void bf_family_free(bf_family* fam);

bf_status bf_family_json(const bf_family* fam, char** out);
bf_status bf_family_table(const bf_family* fam, char** out);
bf_status bf_family_bound(const bf_family* fam, double* out);
bf_status bf_family_ideal_value(const bf_family* fam, double* out);
bf_status bf_family_single_square(const bf_family* fam, int* out);

/* Independent oracles for the instance's Bell expression. Level is one of
 * "1", "1ab", "2". */
bf_status bf_family_local_bound(const bf_family* fam, double* out);
bf_status bf_family_npa_bound(const bf_family* fam, const char* level, double* out);

/* JSON report of the variational Hessian at the ideal realization (the
 * expression scaled to the sum-of-squares normalization S/2). */
bf_status bf_family_hessian(const bf_family* fam, char** out);

/* Full verification: certificate identity, ideal value, bounds sandwich,
 * and the variational stationarity check. cert_json optionally replaces the
 * instance's certificate (e.g. loaded from a file). *pass is set to 1 iff
 * every check holds. */
bf_status bf_family_certify(const bf_family* fam, const char* cert_json, const char* level,
                            double tol, char** out, int* pass);

/* Relation residuals plus the swap-gate extraction on the ideal
 * realization; JSON report. *fidelity receives the swap fidelity. */
bf_status bf_family_selftest(const bf_family* fam, char** out, double* fidelity);

/* Scans emit CSV with a header row and deterministic row order (identical
 * bytes for any jobs value). Rows whose solver fails carry "nan" entries. */

/* Columns: q, npa_bound, local_bound, ideal_value. */
bf_status bf_scan_fig1(double qmin, double qmax, double qstep, const char* level, int jobs,
                       char** out);
/* grid x grid interior cells of b1 in (-1.5, 0), b2 in (0, 1.5);
 * columns: b1, b2, delta. */
bf_status bf_scan_fig4(double theta, int grid, const char* level, int jobs, char** out);
/* One family parameter swept with the rest fixed; columns: param,
 * local_bound, npa_bound, sos_C. */
bf_status bf_scan_family(const char* kind, const char* const* fixed_keys,
                         const double* fixed_values, int nfixed, const char* param, double lo,
                         double hi, double step, const char* level, int jobs, char** out);

#ifdef __cplusplus
}
#endif

#endif /* BELLFORGE_H */
