#ifndef LDPLAB_H
#define LDPLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes. */
#define LDPLAB_OK 0
#define LDPLAB_EINVAL 1  /* bad argument */
#define LDPLAB_ESCHEMA 2 /* config parse or schema failure */
#define LDPLAB_ERUN 3    /* runtime failure during an experiment */

typedef struct ldplab_config ldplab_config;

/* Last error message for the calling thread (empty string if none). */
const char* ldplab_last_error(void);

const char* ldplab_version(void);

/* Parses a config from text or file; on success stores a handle in *out. */
int ldplab_config_parse(const char* text, ldplab_config** out);
int ldplab_config_load(const char* path, ldplab_config** out);
void ldplab_config_free(ldplab_config* cfg);

/* Full schema validation; returns LDPLAB_ESCHEMA with the violation list in
 * ldplab_last_error() on failure. */
int ldplab_config_validate(ldplab_config* cfg);

/* Canonical serialization; returns a buffer owned by the handle, valid until
 * the next call on the same handle or free. */
const char* ldplab_config_serialize(ldplab_config* cfg);

/* Overrides (pass NULL / negative to keep the config's value). */
int ldplab_config_set_out_dir(ldplab_config* cfg, const char* out_dir);
int ldplab_config_set_workers(ldplab_config* cfg, int workers);
int ldplab_config_set_seed(ldplab_config* cfg, int64_t seed);

/* Runs the experiment; *exit_code receives the CLI contract code
 * (0 pass, 1 error, 2 condition failures). */
int ldplab_run(ldplab_config* cfg, int* exit_code);

/* Model catalog text (static storage). */
const char* ldplab_list_models(void);

#ifdef __cplusplus
}
#endif

#endif /* LDPLAB_H */
