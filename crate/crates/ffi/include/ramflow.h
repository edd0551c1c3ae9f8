#ifndef RAMFLOW_H
#define RAMFLOW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RamflowStatus {
  RamflowStatus_Ok = 0,
  RamflowStatus_NullPointer = 1,
  RamflowStatus_InvalidUtf8 = 2,
  RamflowStatus_Malformed = 3,
  RamflowStatus_NotMember = 4,
  RamflowStatus_BoundTooLarge = 5,
  RamflowStatus_InvalidArgument = 6,
  RamflowStatus_Precondition = 7,
  RamflowStatus_Panic = 8,
} RamflowStatus;

typedef struct RamflowClass RamflowClass;

typedef struct RamflowConstruction RamflowConstruction;

typedef struct RamflowStructure RamflowStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Why the last call on this thread failed, or null after a success. Valid
 * until the next call on the same thread.
 */
const char *ramflow_last_error(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void ramflow_string_free(char *s);

/**
 * Parses a structure document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum RamflowStatus ramflow_structure_from_json(const char *json, struct RamflowStructure **out);

/**
 * Serializes a structure; release the string with `ramflow_string_free`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum RamflowStatus ramflow_structure_to_json(const struct RamflowStructure *s, char **out);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum RamflowStatus ramflow_structure_size(const struct RamflowStructure *s, size_t *out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void ramflow_structure_free(struct RamflowStructure *s);

/**
 * Parses a class such as `graph`, `kn-free:4` or `poset`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum RamflowStatus ramflow_class_parse(const char *spec, bool ordered, struct RamflowClass **out);

/**
 * # Safety
 * `c` must come from this library or be null.
 */
void ramflow_class_free(struct RamflowClass *c);

/**
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RamflowStatus ramflow_class_contains(const struct RamflowClass *c,
                                          const struct RamflowStructure *s,
                                          bool *out);

/**
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RamflowStatus ramflow_are_isomorphic(const struct RamflowStructure *a,
                                          const struct RamflowStructure *b,
                                          bool *out);

/**
 * Number of embeddings of `b` into `a`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RamflowStatus ramflow_count_embeddings(const struct RamflowStructure *b,
                                            const struct RamflowStructure *a,
                                            size_t *out);

/**
 * Decides whether every `k`-colouring of the copies of `a` in `c` has a
 * copy of `b` in one colour.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RamflowStatus ramflow_arrows(const struct RamflowStructure *c,
                                  const struct RamflowStructure *b,
                                  const struct RamflowStructure *a,
                                  size_t k,
                                  bool *out);

/**
 * Amalgam of `i: a → b` and `j: a → c` in `class`. The maps list the
 * images of `0..|a|`; `out_k` and `out_l` may be null, otherwise they
 * receive `|b|` and `|c|` entries.
 *
 * # Safety
 * Handles must be live; `i` and `j` must point to `a_len` readable
 * entries; non-null out pointers must be writable for their lengths.
 */
enum RamflowStatus ramflow_amalgamate(const struct RamflowStructure *a,
                                      const struct RamflowStructure *b,
                                      const struct RamflowStructure *c,
                                      const size_t *i,
                                      const size_t *j,
                                      size_t a_len,
                                      const struct RamflowClass *class_,
                                      struct RamflowStructure **out_d,
                                      size_t *out_k,
                                      size_t *out_l);

/**
 * Number of admissible linear orders of `s` for `class`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RamflowStatus ramflow_admissible_order_count(const struct RamflowStructure *s,
                                                  const struct RamflowClass *class_,
                                                  size_t *out);

/**
 * Whether the automorphism group of `s` acts transitively on its
 * admissible orders.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RamflowStatus ramflow_flow_is_minimal(const struct RamflowStructure *s,
                                           const struct RamflowClass *class_,
                                           bool *out);

/**
 * Starts a limit construction from `seed`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RamflowStatus ramflow_construction_new(const struct RamflowStructure *seed,
                                            const struct RamflowClass *class_,
                                            size_t window,
                                            struct RamflowConstruction **out);

/**
 * Performs one step and writes the number of invariant violations found
 * on the new stage.
 *
 * # Safety
 * `st` must be a live handle; `violations` may be null.
 */
enum RamflowStatus ramflow_construction_step(struct RamflowConstruction *st, size_t *violations);

/**
 * Copy of the latest stage.
 *
 * # Safety
 * `st` must be a live handle; `out` must be writable.
 */
enum RamflowStatus ramflow_construction_current(const struct RamflowConstruction *st,
                                                struct RamflowStructure **out);

/**
 * # Safety
 * `st` must come from this library or be null.
 */
void ramflow_construction_free(struct RamflowConstruction *st);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RAMFLOW_H */
