#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "twistkit/cdga.hpp"
#include "twistkit/intmat.hpp"
#include "twistkit/report.hpp"

namespace twk {

// Piecewise-linear scalar on a cover region: a constant plus a rational
// combination of the barycentric coordinates t_a of the nerve vertices.
// Circle-valued data are these functions read mod Z.
struct PLFunction {
  Rat c0;
  std::map<int, Rat> lin;  // vertex label -> coefficient of t_label

  bool operator==(const PLFunction& o) const { return c0 == o.c0 && lin == o.lin; }
};

PLFunction pl_const(const Rat& c);
PLFunction pl_term(int label, const Rat& coeff);
PLFunction pl_add(const PLFunction& a, const PLFunction& b);
PLFunction pl_sub(const PLFunction& a, const PLFunction& b);
PLFunction pl_scale(const Rat& c, const PLFunction& a);
std::string pl_str(const PLFunction& a);
PLFunction pl_parse(const std::string& text, const std::string& source = "<pl>");

// One overlap region of a cover: the patches meeting there, the CDGA of
// polynomial forms on the region, and the designated differentials dt_a of
// whichever barycentric coordinates the data need.
struct CoverFace {
  std::vector<int> verts;  // sorted patch ids, size 1 (patch) to 4 (quadruple)
  CdgaModel model;
  std::map<int, Form> dt;
};

// Finite cover with one CDGA per overlap and restriction maps along
// codimension-one inclusions; optionally a designated global model with
// restrictions onto every patch. Holds pointers into its own face table, so
// it is movable but not copyable.
struct CoverDiagram {
  std::string name;
  std::vector<int> patches;
  std::map<std::vector<int>, CoverFace> faces;
  std::map<std::pair<std::vector<int>, std::vector<int>>, CdgaMap> rmaps;
  const CdgaModel* global = nullptr;
  std::map<int, CdgaMap> global_restrict;

  CoverDiagram() = default;
  CoverDiagram(const CoverDiagram&) = delete;
  CoverDiagram& operator=(const CoverDiagram&) = delete;
  CoverDiagram(CoverDiagram&&) = default;
  CoverDiagram& operator=(CoverDiagram&&) = default;

  bool has_face(const std::vector<int>& verts) const;
  const CoverFace& face(const std::vector<int>& verts) const;
  const CdgaMap& rmap(const std::vector<int>& sub, const std::vector<int>& sup) const;
  // Labels whose barycentric coordinate is not identically zero on the region.
  std::vector<int> present(const std::vector<int>& verts) const;
};

// Structural checks: subset-closed nerve, valid restriction maps, commuting
// composites, coherent coordinate differentials. Throws on violation.
void validate_cover(const CoverDiagram& cd);

// Restriction of PL data onto a deeper overlap: coordinates that vanish there
// are dropped.
PLFunction pl_restrict(const CoverDiagram& cd, const PLFunction& f,
                       const std::vector<int>& face);
// d of the linear interpolation, via the face's designated dt forms. Throws
// when a needed dt is not designated.
Form pl_d(const CoverDiagram& cd, const std::vector<int>& face, const PLFunction& f);
// Constant value of f on the region, if f is constant there (uses the
// relation sum of present t_a = 1); nullopt when genuinely non-constant.
std::optional<Rat> pl_const_value(const CoverDiagram& cd, const PLFunction& f,
                                  const std::vector<int>& face);

// Local data of a differential twist: eps = exp(2 pi i f) per triple overlap
// kept additively as f, a connection 1-form per double overlap, a curving
// 2-form per patch.
struct DeligneCocycle {
  const CoverDiagram* cover = nullptr;
  std::map<std::vector<int>, PLFunction> eps;
  std::map<std::vector<int>, Form> A;
  std::map<int, Form> B;
};

DeligneCocycle zero_cocycle(const CoverDiagram& cd);

// Equivalence data between two cocycles on the same cover: h = exp(2 pi i g)
// per double overlap and a 1-form per patch. curving_preserving additionally
// demands d lambda = B' - B.
struct DeligneOneSimplex {
  const CoverDiagram* cover = nullptr;
  DeligneCocycle source, target;
  std::map<std::vector<int>, PLFunction> g;
  std::map<int, Form> lambda;
  bool curving_preserving = true;
};

// Verifies delta f integral on quadruples, delta A = df on triples,
// delta B = dA on doubles. Failures are report lines naming the face.
Report check_cocycle(const DeligneCocycle& c);

// The unique global closed 3-form restricting to dB_i on every patch.
Form curvature(const DeligneCocycle& c);

// Integer class of the Cech 3-cocycle delta f, reduced by Smith normal form
// on the nerve's simplicial cochain complex.
struct DDClass {
  CokerClass cls;
  std::vector<std::pair<std::vector<int>, Int>> cocycle;  // per tetrahedron
};
DDClass dd_class(const DeligneCocycle& c);

// Checks delta g = f' - f mod Z, delta lambda = A' - A - dg, and (for the
// curving-preserving flavor) d lambda = B' - B.
Report check_one_simplex(const DeligneOneSimplex& s);

// Glues d lambda_i + B_i (source curving; pass false to glue d lambda alone)
// into a global 2-form. Throws when overlaps disagree, and verifies
// d kappa = curvature(source) resp. 0.
Form kappa(const DeligneOneSimplex& s, bool include_source_curving = true);

DeligneCocycle add_cocycles(const DeligneCocycle& a, const DeligneCocycle& b);
DeligneCocycle scale_cocycle(const Rat& c, const DeligneCocycle& a);

// For a simplex into the zero cocycle: simplex conditions plus vanishing of
// the glued curving.
Report trivialization_check(const DeligneOneSimplex& s);

// Gauge change by per-patch circle functions r: g += delta r, lambda -= dr.
DeligneOneSimplex r_modify(const DeligneOneSimplex& s,
                           const std::map<int, PLFunction>& r);

// Induced diagram on a subset of patches, and a cocycle transported onto it.
CoverDiagram sub_diagram(const CoverDiagram& cd, const std::vector<int>& keep);
DeligneCocycle restrict_cocycle(const DeligneCocycle& c, const CoverDiagram& sub);

// A cover together with the cocycle shipped on it.
struct CoverBundle {
  CoverDiagram cover;
  DeligneCocycle cocycle;
};

std::unique_ptr<CoverBundle> parse_cover(const std::string& text,
                                         const std::string& source = "<cover>");
std::string cover_str(const CoverDiagram& cd, const DeligneCocycle& c);
std::unique_ptr<CoverBundle> load_cover_file(const std::string& path);

// Five-patch star cover of the three-sphere (nerve = boundary of the
// 4-simplex) carrying the class-k cocycle with curvature k times the volume
// generator.
std::unique_ptr<CoverBundle> make_s3_bundle(long k);

// Suspended six-vertex projective plane: the shipped 2-torsion class, with
// half-integer constant eps data and trivial forms.
std::unique_ptr<CoverBundle> make_torsion_bundle();

}  // namespace twk
