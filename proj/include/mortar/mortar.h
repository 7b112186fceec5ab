/* C interface of the mortar metamorphic dialogue testing library. */
#ifndef MORTAR_MORTAR_H_
#define MORTAR_MORTAR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(MORTAR_BUILDING_LIBRARY)
#define MORTAR_API __attribute__((visibility("default")))
#else
#define MORTAR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mortar_status {
  MORTAR_OK = 0,
  MORTAR_USAGE = 1,     /* bad option or configuration */
  MORTAR_PARTIAL = 2,   /* some dialogues failed */
  MORTAR_FAILED = 3,    /* nothing usable was produced */
  MORTAR_PARSE = 4,     /* malformed input file */
  MORTAR_IO = 5,
  MORTAR_TRANSPORT = 6,
  MORTAR_INTERNAL = 7
} mortar_status;

typedef struct mortar_options mortar_options;
typedef struct mortar_result mortar_result;
typedef struct mortar_dataset mortar_dataset;

/* Message of the last failing call on this thread; never NULL. */
MORTAR_API const char *mortar_last_error(void);
MORTAR_API const char *mortar_version(void);

MORTAR_API mortar_options *mortar_options_create(void);
MORTAR_API void mortar_options_destroy(mortar_options *opts);
/* Flag layer; keys use snake_case names such as "eps_a" or "out_dir". */
MORTAR_API mortar_status mortar_options_set(mortar_options *opts, const char *key,
                                            const char *value);
/* JSON config file layer, overridden by MORTAR_<KEY> env vars and flags. */
MORTAR_API mortar_status mortar_options_load_file(mortar_options *opts, const char *path);
MORTAR_API mortar_status mortar_options_add_input(mortar_options *opts, const char *path);
/* Resolves all layers and reports the first invalid value. */
MORTAR_API mortar_status mortar_options_validate(const mortar_options *opts);

/* Commands. On return *out (if non-NULL) holds a result to destroy, also on
 * MORTAR_PARTIAL and MORTAR_FAILED. */
MORTAR_API mortar_status mortar_generate(const mortar_options *opts, mortar_result **out);
MORTAR_API mortar_status mortar_run(const mortar_options *opts, mortar_result **out);
MORTAR_API mortar_status mortar_detect(const mortar_options *opts, mortar_result **out);
MORTAR_API mortar_status mortar_report(const mortar_options *opts, mortar_result **out);

MORTAR_API const char *mortar_result_text(const mortar_result *result);
MORTAR_API const char *mortar_result_json(const mortar_result *result);
MORTAR_API void mortar_result_destroy(mortar_result *result);

/* format: "coqa" or "generic". */
MORTAR_API mortar_status mortar_dataset_load(const char *path, const char *format,
                                             mortar_dataset **out);
MORTAR_API void mortar_dataset_destroy(mortar_dataset *dataset);
MORTAR_API size_t mortar_dataset_dialogue_count(const mortar_dataset *dataset);
MORTAR_API size_t mortar_dataset_round_count(const mortar_dataset *dataset);
/* Generic-format JSON; owned by the dataset. */
MORTAR_API const char *mortar_dataset_json(mortar_dataset *dataset);

/* Answer scoring with the hashing embedder. */
MORTAR_API mortar_status mortar_score(const char *pred, const char *gold, double *ss,
                                      double *em, double *f1, double *mss);
MORTAR_API double mortar_mss(double ss, double em, double f1);

#ifdef __cplusplus
}
#endif

#endif /* MORTAR_MORTAR_H_ */
