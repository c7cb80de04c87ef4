#ifndef TYMC_H
#define TYMC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum TymStatus {
  TymStatus_Ok = 0,
  /**
   * A required pointer argument was null.
   */
  TymStatus_NullArgument = 1,
  /**
   * A string argument was not UTF-8.
   */
  TymStatus_InvalidUtf8 = 2,
  /**
   * The source has lexical, syntax or semantic errors.
   */
  TymStatus_Diagnostics = 3,
  /**
   * The args text is malformed or does not match the parameters.
   */
  TymStatus_BadArguments = 4,
  /**
   * The program raised a runtime error or called `error`.
   */
  TymStatus_RuntimeError = 5,
  /**
   * An internal error; the library is still usable.
   */
  TymStatus_Internal = 6,
} TymStatus;

/**
 * Code generation target.
 */
typedef enum TymTarget {
  TymTarget_Octave = 0,
  TymTarget_Standalone = 1,
  /**
   * Octave target with `error` lowered to a stream print.
   */
  TymTarget_OctaveStream = 2,
} TymTarget;

/**
 * An analyzed tym function.
 */
typedef struct TymProgram TymProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Analyzes `source`. On success stores a new handle in `*out`. Rendered
 * diagnostics (errors, or warnings on success) go to `*diagnostics` when it
 * is not null.
 *
 * # Safety
 * `source` must be a NUL-terminated string; `out` must be writable;
 * `diagnostics` must be null or writable.
 */
enum TymStatus tym_program_new(const char *source, struct TymProgram **out, char **diagnostics);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `program` must be null or a handle from [`tym_program_new`] that has not
 * been freed.
 */
void tym_program_free(struct TymProgram *program);

/**
 * The function name. The string is owned by the handle.
 *
 * # Safety
 * `program` must be a live handle.
 */
const char *tym_program_name(const struct TymProgram *program);

/**
 * Number of parameters, or 0 for a null handle.
 *
 * # Safety
 * `program` must be null or a live handle.
 */
uintptr_t tym_program_param_count(const struct TymProgram *program);

/**
 * Lowers the program to C++ and stores the translation unit in `*out`.
 *
 * # Safety
 * `program` must be a live handle; `out` must be writable.
 */
enum TymStatus tym_program_emit(const struct TymProgram *program,
                                enum TymTarget target,
                                char **out);

/**
 * Runs the program in the interpreter. `args` is in the args file format
 * and may be null for a function without parameters. The printed result
 * goes to `*out_stdout` and messages to `*out_stderr`; either may be null.
 *
 * # Safety
 * `program` must be a live handle; `args` must be null or NUL-terminated;
 * the output pointers must be null or writable.
 */
enum TymStatus tym_program_interp(const struct TymProgram *program,
                                  const char *args,
                                  char **out_stdout,
                                  char **out_stderr);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library that has not been freed.
 */
void tym_string_free(char *s);

/**
 * Library version, statically allocated.
 */
const char *tym_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TYMC_H */
