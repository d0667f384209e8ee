#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "matrixgt/annotator.hpp"
#include "matrixgt/codec.hpp"
#include "matrixgt/dataset.hpp"
#include "matrixgt/error.hpp"
#include "matrixgt/evaluator.hpp"
#include "matrixgt/kitti.hpp"
#include "matrixgt/pipeline.hpp"
#include "matrixgt/raster.hpp"
#include "matrixgt/scene.hpp"
#include "matrixgt/stats.hpp"

namespace py = pybind11;
using namespace matrixgt;

namespace {

template <typename T>
py::array_t<T> to_numpy(const Image<T>& img) {
  py::array_t<T> out({static_cast<py::ssize_t>(img.height()), static_cast<py::ssize_t>(img.width())});
  if (img.size()) std::memcpy(out.mutable_data(), img.samples().data(), img.size() * sizeof(T));
  return out;
}

template <typename T>
Image<T> from_numpy(const py::array_t<T, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw DomainError("expected a 2-D array");
  const auto h = static_cast<std::uint32_t>(a.shape(0));
  const auto w = static_cast<std::uint32_t>(a.shape(1));
  return Image<T>(w, h, std::vector<T>(a.data(), a.data() + a.size()));
}

py::array raster_to_numpy(const Raster& r) {
  return std::visit([](const auto& img) -> py::array { return to_numpy(img); }, r);
}

Raster raster_from_numpy(const py::array& a) {
  if (py::isinstance<py::array_t<std::uint8_t>>(a)) return from_numpy<std::uint8_t>(a);
  if (py::isinstance<py::array_t<std::uint16_t>>(a)) return from_numpy<std::uint16_t>(a);
  if (py::isinstance<py::array_t<float>>(a)) return from_numpy<float>(a);
  throw DomainError("raster dtype must be uint8, uint16 or float32");
}

py::array_t<std::uint8_t> color_to_numpy(const ColorImage& img) {
  py::array_t<std::uint8_t> out({static_cast<py::ssize_t>(img.height()), static_cast<py::ssize_t>(img.width()),
                                 py::ssize_t{3}});
  auto* p = out.mutable_data();
  for (const Rgb& c : img.samples()) {
    *p++ = c.r;
    *p++ = c.g;
    *p++ = c.b;
  }
  return out;
}

py::object optional_ap(const std::optional<double>& ap) { return ap ? py::cast(*ap) : py::none(); }

}  // namespace

PYBIND11_MODULE(_matrixgt, m) {
  m.doc() = "Synthetic vehicle ground truth: scene simulation, box annotation and KITTI-style evaluation.";

  auto base = py::register_exception<Error>(m, "MatrixgtError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<TruncationError>(m, "TruncationError", base);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<BehindCameraError>(m, "BehindCameraError", base);

  // geometry
  py::class_<Vec3>(m, "Vec3")
      .def(py::init<double, double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("z") = 0.0)
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def("__eq__", [](const Vec3& a, const Vec3& b) { return a == b; })
      .def("__repr__", [](const Vec3& v) {
        std::ostringstream s;
        s << "Vec3(" << v.x << ", " << v.y << ", " << v.z << ")";
        return s.str();
      });

  py::class_<Box2>(m, "Box2")
      .def(py::init<double, double, double, double>(), py::arg("left") = 0.0, py::arg("top") = 0.0,
           py::arg("right") = 0.0, py::arg("bottom") = 0.0)
      .def_readwrite("left", &Box2::left)
      .def_readwrite("top", &Box2::top)
      .def_readwrite("right", &Box2::right)
      .def_readwrite("bottom", &Box2::bottom)
      .def_property_readonly("width", &Box2::width)
      .def_property_readonly("height", &Box2::height)
      .def_property_readonly("area", &Box2::area)
      .def("as_tuple", [](const Box2& b) { return py::make_tuple(b.left, b.top, b.right, b.bottom); })
      .def("__eq__", [](const Box2& a, const Box2& b) { return a == b; })
      .def("__repr__", [](const Box2& b) {
        std::ostringstream s;
        s << "Box2(" << b.left << ", " << b.top << ", " << b.right << ", " << b.bottom << ")";
        return s.str();
      });

  // codec
  py::class_<DepthCodecParams>(m, "DepthCodecParams")
      .def(py::init<>())
      .def(py::init([](double near_m, double far_m) {
             DepthCodecParams p{near_m, far_m};
             p.validate();
             return p;
           }),
           py::arg("near_m"), py::arg("far_m"))
      .def_readwrite("near_m", &DepthCodecParams::near_m)
      .def_readwrite("far_m", &DepthCodecParams::far_m);

  m.def("encode_log_depth", &encode_log_depth, py::arg("z"), py::arg("params") = DepthCodecParams{});
  m.def(
      "linearize_depth", [](double d, const DepthCodecParams& p) { return linearize_depth(d, p); }, py::arg("d"),
      py::arg("params") = DepthCodecParams{});
  m.def(
      "linearize_raster",
      [](const py::array_t<float, py::array::c_style | py::array::forcecast>& a, const DepthCodecParams& p) {
        const auto dm = linearize_depth_map(from_numpy<float>(a), p);
        return to_numpy(dm);
      },
      py::arg("encoded"), py::arg("params") = DepthCodecParams{});

  py::enum_<ObjectClass>(m, "ObjectClass")
      .value("Background", ObjectClass::Background)
      .value("Ground", ObjectClass::Ground)
      .value("Vehicle", ObjectClass::Vehicle)
      .value("Distractor", ObjectClass::Distractor);

  m.def(
      "pack_stencil", [](int class_id, int flags) { return pack_stencil({class_id, flags}); }, py::arg("class_id"),
      py::arg("flags") = 0);
  m.def("unpack_stencil", [](std::uint8_t b) {
    const auto v = unpack_stencil(b);
    return py::make_tuple(v.class_id, v.flags);
  });

  // raster files
  m.def(
      "read_raster", [](const std::filesystem::path& p) { return raster_to_numpy(read_raster(p)); }, py::arg("path"));
  m.def(
      "write_raster", [](const py::array& a, const std::filesystem::path& p) { write_raster(raster_from_numpy(a), p); },
      py::arg("array"), py::arg("path"));
  m.def(
      "encode_raster",
      [](const py::array& a) {
        const auto bytes = encode_raster(raster_from_numpy(a));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("array"));
  m.def(
      "decode_raster",
      [](const py::bytes& b) {
        const std::string s = b;
        return raster_to_numpy(
            decode_raster({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()}));
      },
      py::arg("data"));

  // scene
  py::class_<CameraModel>(m, "CameraModel")
      .def(py::init<>())
      .def_readwrite("fx", &CameraModel::fx)
      .def_readwrite("fy", &CameraModel::fy)
      .def_readwrite("cx", &CameraModel::cx)
      .def_readwrite("cy", &CameraModel::cy)
      .def_readwrite("width", &CameraModel::width)
      .def_readwrite("height", &CameraModel::height)
      .def_readwrite("depth_params", &CameraModel::depth_params)
      .def("validate", &CameraModel::validate);

  py::class_<Size3>(m, "Size3")
      .def(py::init<double, double, double>(), py::arg("length") = 0.0, py::arg("width") = 0.0,
           py::arg("height") = 0.0)
      .def_readwrite("length", &Size3::length)
      .def_readwrite("width", &Size3::width)
      .def_readwrite("height", &Size3::height);

  py::class_<SceneObject>(m, "SceneObject")
      .def(py::init([](std::uint32_t id, ObjectClass cls, Vec3 center, Size3 size, double yaw) {
             return SceneObject{id, cls, center, size, yaw};
           }),
           py::arg("object_id"), py::arg("object_class"), py::arg("center"), py::arg("size"), py::arg("yaw") = 0.0)
      .def_readwrite("object_id", &SceneObject::object_id)
      .def_readwrite("object_class", &SceneObject::object_class)
      .def_readwrite("center", &SceneObject::center)
      .def_readwrite("size", &SceneObject::size)
      .def_readwrite("yaw", &SceneObject::yaw);

  py::class_<EngineRecord>(m, "EngineRecord")
      .def(py::init<>())
      .def_readwrite("object_id", &EngineRecord::object_id)
      .def_readwrite("object_class", &EngineRecord::object_class)
      .def_readwrite("coarse_box", &EngineRecord::coarse_box)
      .def_readwrite("range_m", &EngineRecord::range_m)
      .def_readwrite("size", &EngineRecord::size)
      .def_readwrite("yaw", &EngineRecord::yaw)
      .def_readwrite("location_cam", &EngineRecord::location_cam);

  py::class_<FrameBundle>(m, "FrameBundle")
      .def_readonly("frame_id", &FrameBundle::frame_id)
      .def_property_readonly("depth", [](const FrameBundle& f) { return to_numpy(f.depth); })
      .def_property_readonly("stencil", [](const FrameBundle& f) { return to_numpy(f.stencil); })
      .def_property_readonly("instance_oracle", [](const FrameBundle& f) { return to_numpy(f.instance_oracle); })
      .def_property_readonly("color",
                             [](const FrameBundle& f) -> py::object {
                               return f.color ? py::object(color_to_numpy(*f.color)) : py::none();
                             })
      .def_readonly("records", &FrameBundle::records)
      .def_readonly("skipped_ids", &FrameBundle::skipped_ids);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("frames", &ScenarioConfig::frames)
      .def_readwrite("camera", &ScenarioConfig::camera)
      .def_readwrite("camera_height_m", &ScenarioConfig::camera_height_m)
      .def_property(
          "vehicle_count", [](const ScenarioConfig& c) { return py::make_tuple(c.vehicle_count.lo, c.vehicle_count.hi); },
          [](ScenarioConfig& c, std::pair<std::int64_t, std::int64_t> r) { c.vehicle_count = {r.first, r.second}; })
      .def_property(
          "distractor_count",
          [](const ScenarioConfig& c) { return py::make_tuple(c.distractor_count.lo, c.distractor_count.hi); },
          [](ScenarioConfig& c, std::pair<std::int64_t, std::int64_t> r) { c.distractor_count = {r.first, r.second}; })
      .def_readwrite("min_depth_gap_m", &ScenarioConfig::min_depth_gap_m)
      .def_readwrite("coarse_inflation", &ScenarioConfig::coarse_inflation)
      .def_readwrite("registration_range_m", &ScenarioConfig::registration_range_m)
      .def_readwrite("write_color", &ScenarioConfig::write_color)
      .def("validate", &ScenarioConfig::validate)
      .def("to_text", [](const ScenarioConfig& c) { return scenario_text(c); });

  m.def(
      "parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
  m.def("generate_scene", &generate_scene, py::arg("config"), py::arg("frame_idx"));
  m.def("coarse_box", &coarse_box, py::arg("camera"), py::arg("obj"));
  m.def(
      "project_point",
      [](const CameraModel& cam, Vec3 p) {
        const auto q = project_point(cam, p);
        return py::make_tuple(q.u, q.v, q.depth);
      },
      py::arg("camera"), py::arg("point"));
  m.def(
      "render_frame",
      [](const CameraModel& cam, const std::vector<SceneObject>& scene, std::uint32_t frame_id, double inflation,
         bool color) {
        RenderOptions opt;
        opt.coarse_inflation = inflation;
        opt.color = color;
        return render_frame(cam, scene, frame_id, opt);
      },
      py::arg("camera"), py::arg("scene"), py::arg("frame_id") = 0, py::arg("coarse_inflation") = 0.10,
      py::arg("color") = false);

  // annotation
  py::class_<RefinementParams>(m, "RefinementParams")
      .def(py::init<>())
      .def_readwrite("rho", &RefinementParams::rho)
      .def_readwrite("iterations", &RefinementParams::iterations)
      .def_readwrite("min_component_px", &RefinementParams::min_component_px)
      .def_readwrite("coarse_box_margin_px", &RefinementParams::coarse_box_margin_px)
      .def_readwrite("extent_margin", &RefinementParams::extent_margin)
      .def_readwrite("record_seed", &RefinementParams::record_seed)
      .def("validate", &RefinementParams::validate);

  py::class_<TightAnnotation>(m, "TightAnnotation")
      .def_readonly("source_id", &TightAnnotation::source_id)
      .def_readonly("object_class", &TightAnnotation::object_class)
      .def_readonly("tight_box", &TightAnnotation::tight_box)
      .def_readonly("visible_px", &TightAnnotation::visible_px)
      .def_readonly("truncation", &TightAnnotation::truncation)
      .def_readonly("occlusion_level", &TightAnnotation::occlusion_level)
      .def_readonly("range_m", &TightAnnotation::range_m)
      .def_readonly("score", &TightAnnotation::score);

  m.def(
      "annotate_frame",
      [](const FrameBundle& f, const RefinementParams& p, const DepthCodecParams& dp) {
        return annotate_frame(f, dp, p);
      },
      py::arg("bundle"), py::arg("params") = RefinementParams{}, py::arg("depth_params") = DepthCodecParams{});
  m.def(
      "count_vehicle_components",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& stencil) {
        return connected_components(vehicle_mask(from_numpy<std::uint8_t>(stencil))).size();
      },
      py::arg("stencil"));

  // labels and evaluation
  py::enum_<Difficulty>(m, "Difficulty")
      .value("Easy", Difficulty::Easy)
      .value("Moderate", Difficulty::Moderate)
      .value("Hard", Difficulty::Hard)
      .value("Unknown", Difficulty::Unknown);

  py::class_<KittiLabel>(m, "KittiLabel")
      .def(py::init<>())
      .def_readwrite("type", &KittiLabel::type)
      .def_readwrite("truncated", &KittiLabel::truncated)
      .def_readwrite("occluded", &KittiLabel::occluded)
      .def_readwrite("alpha", &KittiLabel::alpha)
      .def_readwrite("bbox", &KittiLabel::bbox)
      .def_readwrite("score", &KittiLabel::score)
      .def("__str__", [](const KittiLabel& l) { return format_label(l); });

  m.def("classify_difficulty", [](const KittiLabel& l) { return classify_difficulty(l); }, py::arg("label"));
  m.def("from_annotation", &from_annotation, py::arg("annotation"));
  m.def("format_label", &format_label, py::arg("label"));
  m.def(
      "parse_labels",
      [](const std::string& text) {
        std::istringstream in(text);
        return parse_labels(in);
      },
      py::arg("text"));
  m.def("iou", &iou, py::arg("a"), py::arg("b"));

  py::class_<LevelReport>(m, "LevelReport")
      .def_readonly("level", &LevelReport::level)
      .def_property_readonly("ap", [](const LevelReport& r) { return optional_ap(r.ap); })
      .def_readonly("tp", &LevelReport::tp)
      .def_readonly("fp", &LevelReport::fp)
      .def_readonly("fn", &LevelReport::fn)
      .def_readonly("gt_count", &LevelReport::gt_count);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("iou_threshold", &EvalReport::iou_threshold)
      .def_readonly("frames", &EvalReport::frames)
      .def_property_readonly("levels",
                             [](const EvalReport& r) { return std::vector<LevelReport>(r.levels.begin(), r.levels.end()); })
      .def("to_csv", [](const EvalReport& r) { return report_csv(r); })
      .def("__str__", [](const EvalReport& r) { return format_report(r); });

  m.def(
      "evaluate",
      [](const std::filesystem::path& det, const std::filesystem::path& gt, double thr, const std::string& method) {
        return evaluate(det, gt, thr, parse_ap_method(method));
      },
      py::arg("det_dir"), py::arg("gt_dir"), py::arg("iou_threshold") = 0.7, py::arg("method") = "11pt");

  // dataset pipeline
  m.def("generate_dataset", &generate_dataset, py::arg("config"), py::arg("out_dir"), py::arg("workers") = 1u,
        py::call_guard<py::gil_scoped_release>());
  m.def("annotate_dataset", &annotate_dataset, py::arg("dataset_dir"), py::arg("labels_dir"),
        py::arg("params") = RefinementParams{}, py::arg("workers") = 1u, py::call_guard<py::gil_scoped_release>());
  m.def("oracle_labels_dataset", &oracle_labels_dataset, py::arg("dataset_dir"), py::arg("labels_dir"),
        py::arg("workers") = 1u, py::call_guard<py::gil_scoped_release>());
  m.def(
      "write_stats",
      [](const std::filesystem::path& labels, const std::filesystem::path& out, std::uint32_t cols,
         std::uint32_t rows) {
        StatsOptions opt;
        opt.cols = cols;
        opt.rows = rows;
        write_stats(labels, out, opt);
      },
      py::arg("labels_dir"), py::arg("out_dir"), py::arg("cols") = 48u, py::arg("rows") = 27u);
  m.def(
      "centroid_heatmap",
      [](const std::filesystem::path& labels, double w, double h, std::uint32_t cols, std::uint32_t rows) {
        const auto g = centroid_heatmap(labels, w, h, cols, rows);
        py::array_t<std::uint64_t> out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
        std::memcpy(out.mutable_data(), g.counts.data(), g.counts.size() * sizeof(std::uint64_t));
        return out;
      },
      py::arg("labels_dir"), py::arg("image_width") = 640.0, py::arg("image_height") = 480.0, py::arg("cols") = 48u,
      py::arg("rows") = 27u);
}
