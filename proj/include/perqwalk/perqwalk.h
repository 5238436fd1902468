// Copyright 2026 The perqwalk Authors
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

/* C interface to perqwalk. All handles are opaque; every fallible call
 * returns a pqw_status and leaves a message retrievable through
 * pqw_last_error() on the calling thread. */

#ifndef PERQWALK_PERQWALK_H_
#define PERQWALK_PERQWALK_H_

#include <stddef.h>

#if defined(_WIN32)
#define PQW_API __declspec(dllexport)
#else
#define PQW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pqw_status {
  PQW_OK = 0,
  PQW_ERR_CONFIG = 1,
  PQW_ERR_RUNTIME = 2,
  PQW_ERR_INVALID_ARGUMENT = 3,
  PQW_ERR_IO = 4
} pqw_status;

typedef struct pqw_config pqw_config;
typedef struct pqw_report pqw_report;
typedef struct pqw_graph pqw_graph;

PQW_API const char* pqw_version(void);
PQW_API const char* pqw_last_error(void);
PQW_API const char* pqw_status_name(pqw_status status);

/* Strings returned through char** outputs are owned by the caller. */
PQW_API void pqw_string_free(char* s);

/* Configuration */
PQW_API pqw_status pqw_config_load(const char* path, pqw_config** out);
PQW_API pqw_status pqw_config_parse(const char* text, pqw_config** out);
PQW_API void pqw_config_free(pqw_config* config);
/* 0 selects the hardware concurrency. */
PQW_API pqw_status pqw_config_set_threads(pqw_config* config, size_t threads);
PQW_API pqw_status pqw_config_set_output(pqw_config* config, const char* dir);
PQW_API pqw_status pqw_config_output(const pqw_config* config, char** out);
/* Resolved configuration (all defaults filled in) as JSON. */
PQW_API pqw_status pqw_config_to_json(const pqw_config* config, char** out);

/* Runs. A NULL outdir uses the configured output directory. */
PQW_API pqw_status pqw_run(const pqw_config* config, const char* outdir, pqw_report** out);
PQW_API pqw_status pqw_sweep(const pqw_config* config, const char* outdir, pqw_report** out);
PQW_API void pqw_report_free(pqw_report* report);
PQW_API size_t pqw_report_file_count(const pqw_report* report);
/* Borrowed; valid until the report is freed. NULL when out of range. */
PQW_API const char* pqw_report_file(const pqw_report* report, size_t index);
PQW_API pqw_status pqw_report_summary_json(const pqw_report* report, char** out);

/* Graphs. type is one of "ring", "line", "complete", "star". */
PQW_API pqw_status pqw_graph_create(const char* type, size_t nodes, pqw_graph** out);
PQW_API pqw_status pqw_graph_load(const char* path, pqw_graph** out);
PQW_API void pqw_graph_free(pqw_graph* graph);
PQW_API size_t pqw_graph_node_count(const pqw_graph* graph);
PQW_API size_t pqw_graph_edge_count(const pqw_graph* graph);
/* Row-major n*n Laplacian (adjacency minus degree). */
PQW_API pqw_status pqw_graph_laplacian(const pqw_graph* graph, double* out, size_t len);

/* Closed forms */
PQW_API pqw_status pqw_grover_probability(size_t nodes, double t, double* out);
/* Noiseless ring spreading from `origin`, n entries. */
PQW_API pqw_status pqw_bessel_distribution(size_t nodes, size_t origin, double t, double* out,
                                           size_t len);

#ifdef __cplusplus
}
#endif

#endif  // PERQWALK_PERQWALK_H_
