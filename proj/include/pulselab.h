/* pulselab — spatially periodic bistable reaction-diffusion laboratory.
 *
 * C interface over the core library: opaque reaction handles, direction
 * lattice utilities, the Freidlin-Gartner envelope and the experiment
 * runner that backs the command line tool. All functions return PLAB_OK
 * on success; on failure they return an error code and leave a message
 * readable through plab_last_error() (thread local).
 */
#ifndef PULSELAB_H
#define PULSELAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define PLAB_OK 0
#define PLAB_VERDICT_FAIL 1  /* a stated verdict did not pass */
#define PLAB_CONFIG_ERROR 2  /* malformed configuration or arguments */
#define PLAB_NUMERIC_ERROR 3 /* divergence, non-convergence, contamination */

typedef struct plab_reaction plab_reaction;

/* Message of the most recent failure on this thread; never NULL. */
const char* plab_last_error(void);

/* --- reactions ------------------------------------------------------- */

/* Builds a reaction from its JSON description, e.g.
 *   {"kind":"family_1d","tau":0.5,"sigma":0.1}
 * Kinds: cubic | family_1d | family_multidir | stacked | rescaled. */
int plab_reaction_create(const char* spec_json, plab_reaction** out);
void plab_reaction_free(plab_reaction* r);

int plab_reaction_dim(const plab_reaction* r);
int plab_reaction_num_levels(const plab_reaction* r);
/* Fills `out` with num_levels ascending stable levels. */
int plab_reaction_levels(const plab_reaction* r, double* out);
/* Fills `out` with dim period lengths. */
int plab_reaction_period(const plab_reaction* r, double* out);
double plab_reaction_gamma(const plab_reaction* r);
double plab_reaction_delta0(const plab_reaction* r);

/* f(x, u); x points to dim coordinates. */
int plab_reaction_value(const plab_reaction* r, const double* x, double u, double* out);
int plab_reaction_deriv_u(const plab_reaction* r, const double* x, double u, double* out);

/* Integral of f over one cell and the state range; sign is -1, 0 or +1
 * (0 means zero within the 1e-8 * cell tolerance). */
int plab_integral_sign(const plab_reaction* r, double* value, int* sign);

/* --- direction lattice ------------------------------------------------ */

/* S_L membership: *is_member = 1 and *quantum = M when every
 * L_i zeta_i is an integer multiple of M (continued-fraction search,
 * denominator cap 1e6, tolerance 1e-9); otherwise *is_member = 0. */
int plab_membership_sl(const double* zeta, const double* period_vector, int dim,
                       int* is_member, double* quantum);

/* First `count` unit vectors of S^1 with rational coordinates
 * (inverse stereographic images of low-height rationals); out holds
 * 2*count doubles. */
int plab_rational_directions(int count, double* out);

/* --- spreading envelope ------------------------------------------------ */

/* w*(e) = min over samples e' with e'.e > 0 of c*(e')/(e'.e).
 * dirs: n_samples*dim, speeds: n_samples, queries: n_queries*dim,
 * wstar_out: n_queries. */
int plab_fg_envelope(const double* dirs, const double* speeds, int n_samples, int dim,
                     const double* queries, int n_queries, double* wstar_out);

/* --- experiment runner -------------------------------------------------- */

/* Runs a subcommand (simulate | speed | certify | decay | design |
 * design-nd | terrace | fg | sweep) against a JSON config file, writing
 * CSV artifacts into out_dir. Returns PLAB_OK, PLAB_VERDICT_FAIL,
 * PLAB_CONFIG_ERROR or PLAB_NUMERIC_ERROR. Only randomized Newton
 * seeding consumes the seed. */
int plab_run(const char* subcommand, const char* config_path, const char* out_dir,
             int jobs, unsigned long seed);

#ifdef __cplusplus
}
#endif

#endif /* PULSELAB_H */
