#pragma once

#include <functional>
#include <optional>

#include "weilmmp/cones_ns.hpp"

namespace weilmmp {

/// The contraction diagram X <- X~ -> Y attached to a K-negative extremal
/// face: f is the small Q-Cartierization of the supporting divisor, phi the
/// morphism defined by the section structure of its transform.
struct ContractionDiagram {
  Fan source;             // X
  Fan middle;             // X~
  Fan target;             // Y
  FanMorphism f;          // X~ -> X, small
  FanMorphism phi;        // X~ -> Y
  WeilDivisor support;    // supporting divisor on X
  WeilDivisor transform;  // its strict transform on X~
  bool fiber_type = false;
  std::string step_kind;  // embedding | small | divisorial | fiber
  Index rho_source = 0;   // Picard rank of X  (Q-Cartier class subspace)
  Index rho_middle = 0;   // Picard rank of X~
  bool face_rational_on_middle = false;
  bool fiber_log_fano = false;  // fiber fan complete and projective
};

ContractionDiagram contract_face(const Fan& f, const Face& g);

/// First small projective simplicial refinement, in canonical order, whose
/// canonical divisor is relatively nef over the input.
std::pair<Fan, FanMorphism> qfactorialization_with_nef_K(const Fan& f);

enum class Selector { MaxFace, RayFirst, Callback };
std::string selector_name(Selector s);
std::optional<Selector> selector_from_name(const std::string& name);

struct MmpLimits {
  int max_steps = 16;
  bool restart_on_fiber = false;
};

struct MmpStep {
  Fan model;            // model at the start of the step
  std::string action;   // contract | qfactorialize
  int face_index = -1;  // into the displayed face list
  Index face_dim = 0;
  IntMat face_generators;
  ContractionDiagram diagram;     // when action == contract
  Fan qfact_model;                // when action == qfactorialize
  bool log_terminal = true;       // toric standing assumption
  bool fiber_log_fano = false;
  std::string fingerprint;
};

struct MmpTrace {
  std::vector<MmpStep> steps;
  std::string status;  // minimal-model | mori-fiber-space | inconclusive |
                       // cycle-detected | user-abort
  Fan final_model;
  std::string selector;
  std::optional<std::pair<int, int>> cycle;
  std::vector<std::pair<int, int>> possible_cycles;
};

/// Face chooser for the interactive selector; returns an index into the
/// offered list or -1 to abort.
using FaceChooser = std::function<int(const Fan&, const std::vector<Face>&)>;

MmpTrace run_mmp(const Fan& f, Selector selector, const MmpLimits& limits,
                 const FaceChooser& chooser = {});

/// Lattice-automorphism fan comparison, searched up to a bounded number of
/// candidate ray assignments.
enum class FanEquivalence { No, Yes, Inconclusive };
FanEquivalence equivalent_fans(const Fan& a, const Fan& b, long attempt_bound = 50000);

/// Automorphism-invariant fingerprint used to prefilter cycle candidates.
std::string fan_fingerprint(const Fan& f);

struct CycleScan {
  std::optional<std::pair<int, int>> cycle;          // earliest exact repeat
  std::vector<std::pair<int, int>> possible_cycles;  // bound-limited matches
};

CycleScan detect_cycle(const MmpTrace& trace);

}  // namespace weilmmp
