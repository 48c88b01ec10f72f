#pragma once

#include <vector>

#include "flatbundle/surface.hpp"

namespace flatbundle {

struct SurfacePoint {
  int tri = 0;
  Vec2 pos;  // triangle coordinates
};

// Piece of a boundary saddle inside one triangle, in triangle coordinates.
struct SaddlePiece {
  int saddle;
  Vec2 a, b;
};

struct Cylinder {
  double circumference = 0.0;
  double width = 0.0;             // height across the core curve
  std::vector<int> bottom, top;   // saddle ids; the cylinder lies on the left of its bottom saddles
  int bottomSpine = 0, topSpine = 0;
};

struct CylinderDecomposition {
  Direction direction;
  std::vector<SaddleConnection> saddles;  // oriented along the direction
  std::vector<Cylinder> cylinders;
  std::vector<std::vector<int>> spines;   // saddle ids per connected component
  std::vector<int> spineOfSaddle;
  std::vector<int> spineOfVertex;
  std::vector<std::vector<SaddlePiece>> pieces;  // per triangle
  double areaResidual = 0.0;
};

struct DirectionResult {
  bool closed = false;
  CylinderDecomposition decomposition;  // valid when closed
  double tracedLength = 0.0;
};

DirectionResult trace_direction(const TranslationSurface& s, Direction d, double maxTrace);

struct GraphEdge {
  int cylinder;
  int from, to;  // bottom spine, top spine
  double weight;
};

// Position of a surface point in the dual graph.
struct GraphPoint {
  bool atVertex = true;
  int vertex = 0;
  int edge = -1;
  double t = 0.0;  // distance from the edge's `from` end
};

struct BassSerreGraph {
  const TranslationSurface* surface = nullptr;
  CylinderDecomposition decomposition;
  int vertexCount = 0;
  std::vector<GraphEdge> edges;

  GraphPoint project(const SurfacePoint& p) const;
};

BassSerreGraph build_bass_serre(const TranslationSurface& s, const CylinderDecomposition& c);
double tree_distance(const BassSerreGraph& g, const SurfacePoint& p, const SurfacePoint& q);
// Weighted graph distance between positions (used by tree_distance).
double graph_distance(const BassSerreGraph& g, const GraphPoint& p, const GraphPoint& q);

}  // namespace flatbundle
