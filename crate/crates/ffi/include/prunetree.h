#ifndef PRUNETREE_H
#define PRUNETREE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Pruning function selector for the C surface.
 */
typedef enum PrPhi {
  PrPhi_Height = 0,
  PrPhi_HortonOrder = 1,
  PrPhi_Length = 2,
  PrPhi_LeafCount = 3,
} PrPhi;

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum PrStatus {
  PrStatus_Ok = 0,
  PrStatus_NullArgument = 1,
  PrStatus_InvalidUtf8 = 2,
  PrStatus_InvalidJson = 3,
  PrStatus_DomainError = 4,
  PrStatus_NodeCapExceeded = 5,
  PrStatus_VerifyFailed = 6,
} PrStatus;

/**
 * Opaque initial potential handle.
 */
typedef struct PrPotential PrPotential;

/**
 * Opaque plane tree handle.
 */
typedef struct PrTree PrTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Release a string returned by this library.
 */
void pr_string_free(char *s);

/**
 * Parse a tree from its JSON schema.
 */
enum PrStatus pr_tree_from_json(const char *json, struct PrTree **out);

/**
 * Serialize a tree to its JSON schema.
 */
enum PrStatus pr_tree_to_json(const struct PrTree *tree, char **out);

/**
 * Serialize a tree to Newick with branch lengths.
 */
enum PrStatus pr_tree_to_newick(const struct PrTree *tree, char **out);

void pr_tree_free(struct PrTree *tree);

/**
 * Total edge length of the tree.
 */
enum PrStatus pr_tree_length(const struct PrTree *tree, double *out);

/**
 * Maximal root-to-vertex distance.
 */
enum PrStatus pr_tree_height(const struct PrTree *tree, double *out);

enum PrStatus pr_tree_num_leaves(const struct PrTree *tree, uint64_t *out);

/**
 * Horton-Strahler order (0 for the empty tree).
 */
enum PrStatus pr_tree_horton_order(const struct PrTree *tree, uint32_t *out);

/**
 * Sample an exponential critical Galton-Watson tree. `node_cap = 0` uses
 * the default cap.
 */
enum PrStatus pr_sample_gw(double lambda,
                           uint64_t seed,
                           uint64_t stream,
                           uintptr_t node_cap,
                           struct PrTree **out);

/**
 * Generalized dynamical pruning; returns the pruned tree.
 */
enum PrStatus pr_prune(const struct PrTree *tree, enum PrPhi phi, double t, struct PrTree **out);

/**
 * Generalized dynamical pruning with the cut set as JSON.
 */
enum PrStatus pr_prune_with_cuts(const struct PrTree *tree,
                                 enum PrPhi phi,
                                 double t,
                                 struct PrTree **out,
                                 char **cuts_json);

/**
 * Mass-equipped pruning (phi = length); mass tree as JSON.
 */
enum PrStatus pr_prune_mass_equipped_json(const struct PrTree *tree, double t, char **out);

/**
 * Harris path extrema of a planted tree. The caller owns `*out` and frees
 * it with `pr_doubles_free(*out, *len)`.
 */
enum PrStatus pr_harris_path(const struct PrTree *tree, double **out, uintptr_t *len);

/**
 * Level-set tree of an excursion given by its extrema values.
 */
enum PrStatus pr_level_set_tree(const double *extrema, uintptr_t len, struct PrTree **out);

void pr_doubles_free(double *p, uintptr_t len);

/**
 * Modified Bessel function of the first kind, order 0 or 1.
 */
enum PrStatus pr_bessel_i(uint32_t nu, double z, double *out);

/**
 * Probability density of the total tree length.
 */
enum PrStatus pr_length_pdf(double x, double lambda, double *out);

/**
 * Survival probability of the pruned tree (no closed form for leaf count).
 */
enum PrStatus pr_survival_prob(enum PrPhi phi, double lambda, double delta, double *out);

/**
 * Probability that a random sink is growing at time `t`.
 */
enum PrStatus pr_growth_probability(double t, double lambda, double *out);

/**
 * Sink mass law at time `t`: continuous density at `a` plus the weight of
 * the atom at `2t`.
 */
enum PrStatus pr_sink_mass_pdf(double a,
                               double t,
                               double lambda,
                               double *density,
                               double *atom_weight);

/**
 * Parse an initial potential from JSON ({a, b, extrema}).
 */
enum PrStatus pr_potential_from_json(const char *json, struct PrPotential **out);

/**
 * Random exponential potential (negative Harris path of GW(lambda)).
 */
enum PrStatus pr_potential_sample_exp(double lambda,
                                      uint64_t seed,
                                      uint64_t stream,
                                      struct PrPotential **out);

void pr_potential_free(struct PrPotential *p);

/**
 * Final aggregation time of the potential, half the domain length.
 */
enum PrStatus pr_potential_t_max(const struct PrPotential *p, double *out);

/**
 * Evolve the annihilation dynamics to time `t`; evolved-potential JSON.
 */
enum PrStatus pr_evolve_json(const struct PrPotential *p, double t, char **out);

/**
 * Event-driven sink trajectories as CSV (sink_id, t, x, mass).
 */
enum PrStatus pr_simulate_sinks_csv(const struct PrPotential *p, char **out);

/**
 * Phase-space shock tree rendered as SVG.
 */
enum PrStatus pr_shock_tree_svg(const struct PrPotential *p, char **out);

/**
 * Time until the particles at `x` and `y` collide.
 */
enum PrStatus pr_collision_time(const struct PrPotential *p, double x, double y, double *out);

/**
 * Run a verification suite ("invariance-length", "invariance-height",
 * "invariance-horton", "invariance-leaves", "theorem8", "sink",
 * "equivalence", "roundtrip", or "all"); the JSON report goes to
 * `report_json`. Returns `VerifyFailed` when a check fails.
 */
enum PrStatus pr_verify(const char *suite,
                        double lambda,
                        double t,
                        uint64_t n_samples,
                        uint64_t seed,
                        char **report_json);

/**
 * Library version as a static string (do not free).
 */
const char *pr_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRUNETREE_H */
