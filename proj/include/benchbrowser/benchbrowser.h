#ifndef BENCHBROWSER_H
#define BENCHBROWSER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BB_API __declspec(dllexport)
#else
#define BB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bb_status {
  BB_OK = 0,
  BB_ERR_ARGUMENT = 1,
  BB_ERR_IO = 2,
  BB_ERR_INGEST = 3,
  BB_ERR_KEY = 4,
  BB_ERR_FORMAT = 5,
  BB_ERR_RANGE = 6,
  BB_ERR_COVERAGE = 7,
  BB_ERR_CAPACITY = 8,
  BB_ERR_DIMENSION = 9,
  BB_ERR_STATE = 10,
  BB_ERR_GATEWAY = 11,
  BB_ERR_TEMPLATE = 12,
  BB_ERR_ANCHOR_FORMAT = 13,
  BB_ERR_DEGENERATE = 14,
  BB_ERR_SHAPE = 15,
  BB_ERR_DEADLINE = 16,
  BB_ERR_INTERNAL = 99
} bb_status;

typedef struct bb_engine bb_engine;

/* Message of the last failure on the calling thread; empty after success. */
BB_API const char* bb_last_error(void);
BB_API const char* bb_status_name(bb_status status);

/* Every char* handed out by this library is released with bb_string_free.
   Output pointers are set to NULL on entry, so a failed call never leaves a
   stale value behind. */
BB_API void bb_string_free(char* s);

/* Engine lifetime. The config is JSON; relative paths inside it resolve
   against the config file's directory (or base_dir for the _json variant). */
BB_API bb_status bb_engine_create(const char* config_path, bb_engine** out);
BB_API bb_status bb_engine_create_json(const char* config_json, const char* base_dir, bb_engine** out);
BB_API void bb_engine_destroy(bb_engine* engine);

/* Requests and responses are JSON documents. */
BB_API bb_status bb_engine_query(const bb_engine* engine, const char* request_json, char** out_json);
BB_API bb_status bb_engine_audit_facets(const bb_engine* engine, const char* request_json, char** out_json);
BB_API bb_status bb_engine_audit_convergence(const bb_engine* engine, const char* request_json, char** out_json);
BB_API bb_status bb_engine_benchmarks(const bb_engine* engine, char** out_json);

/* Routes one HTTP request. Never fails for request-level errors: those come
   back as a status code and a JSON error body. */
BB_API bb_status bb_engine_handle(const bb_engine* engine, const char* method, const char* path, const char* body,
                                  int* out_http_status, char** out_body);

/* Blocking HTTP server. host/port/threads of 0/NULL fall back to the config. */
BB_API bb_status bb_engine_serve(bb_engine* engine, const char* host, int port, size_t threads);

/* Standalone operations (no engine). Each writes a JSON summary to out_json.
   gateway_json may be NULL for stub defaults; environment variables apply. */
BB_API bb_status bb_ingest(const char* corpus_path, int expect_unique, const char* shorthand_path,
                           const char* out_corpus_path, char** out_json);
BB_API bb_status bb_index_build(const char* corpus_path, const char* shorthand_path, const char* kind,
                                const char* space, const char* out_path, const char* gateway_json, char** out_json);
/* Writes whatever translated; returns BB_ERR_GATEWAY (with out_json still
   set) when some items failed at the gateway. */
BB_API bb_status bb_translate_shorthand(const char* corpus_path, const char* out_table_path, const char* gateway_json,
                                        size_t parallelism, char** out_json);
/* request: {"k", "use_case_id"?, "strategy"?, "gold"?: [ids],
   "union_relevant"?: [ids], "grades"?: {"relevant","partially_relevant","irrelevant"}} */
BB_API bb_status bb_eval_metrics(const char* judged_path, const char* request_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif
