#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <cstring>

#include "stereo/attention.hpp"
#include "stereo/elas.hpp"
#include "stereo/error.hpp"
#include "stereo/eval.hpp"
#include "stereo/geometry.hpp"
#include "stereo/io.hpp"
#include "stereo/parallel.hpp"
#include "stereo/scenegen.hpp"
#include "stereo/segmentation.hpp"
#include "stereo/sgbm.hpp"

namespace py = pybind11;
using namespace stereo;

namespace {

template <class T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <class T>
Image<T> to_image(const Array<T>& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  Image<T> img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  std::memcpy(img.data(), a.data(), img.size() * sizeof(T));
  return img;
}

template <class T>
Array<T> to_array(const Image<T>& img) {
  Array<T> a({img.height(), img.width()});
  std::memcpy(a.mutable_data(), img.data(), img.size() * sizeof(T));
  return a;
}

Array<std::uint8_t> rgb_to_array(const RgbImage& img) {
  Array<std::uint8_t> a({img.height(), img.width(), 3});
  auto* p = a.mutable_data();
  for (const Rgb& c : img.pixels()) {
    *p++ = c.r;
    *p++ = c.g;
    *p++ = c.b;
  }
  return a;
}

RgbImage array_to_rgb(const Array<std::uint8_t>& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw py::value_error("expected an (h, w, 3) array");
  RgbImage img(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  const auto* p = a.data();
  for (Rgb& c : img.pixels()) {
    c = {p[0], p[1], p[2]};
    p += 3;
  }
  return img;
}

Array<float> disparity_to_array(const DisparityMap& m) { return to_array(to_float(m)); }

py::dict frame_dict(const RenderedFrame& f) {
  py::dict d;
  d["left"] = to_array(f.left);
  d["right"] = to_array(f.right);
  d["color_left"] = rgb_to_array(f.color_left);
  d["gt_disparity"] = to_array(f.gt_disparity);
  d["labels"] = to_array(f.labels);
  d["occluded"] = to_array(f.occluded);
  return d;
}

py::object blob_dict(const std::optional<Blob>& b) {
  if (!b) return py::none();
  py::dict d;
  d["mask"] = to_array(b->mask);
  d["area"] = b->area;
  d["seed_value"] = int(b->seed_value);
  d["seed"] = py::make_tuple(b->seed.x, b->seed.y);
  d["centroid"] = py::make_tuple(b->centroid.x(), b->centroid.y());
  d["bbox"] = py::make_tuple(b->bbox.x, b->bbox.y, b->bbox.w, b->bbox.h);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stereo matching, foremost-blob segmentation and depth-driven tracking";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("set_thread_cap", &set_thread_cap, py::arg("cap"));
  m.def("thread_count", &thread_count);

  py::class_<StereoRig>(m, "StereoRig")
      .def_static("ideal", &StereoRig::ideal, py::arg("width"), py::arg("height"), py::arg("focal"),
                  py::arg("baseline"))
      .def_static("parse", &StereoRig::parse)
      .def_static("load", &StereoRig::load)
      .def("to_text", &StereoRig::to_text)
      .def("baseline", &StereoRig::baseline)
      .def_readwrite("width", &StereoRig::width)
      .def_readwrite("height", &StereoRig::height);

  py::class_<RectifiedCamera>(m, "RectifiedCamera")
      .def(py::init<>())
      .def_readwrite("focal", &RectifiedCamera::focal)
      .def_readwrite("baseline", &RectifiedCamera::baseline)
      .def_readwrite("cx", &RectifiedCamera::cx)
      .def_readwrite("cy", &RectifiedCamera::cy);

  m.def(
      "compute_rectification",
      [](const StereoRig& rig) {
        const auto maps = compute_rectification(rig);
        return py::make_tuple(maps.camera, maps.rotation_left, maps.rotation_right);
      },
      py::arg("rig"), "Rectified camera and the two rectifying rotations.");
  m.def(
      "triangulate",
      [](double u, double v, double d, const RectifiedCamera& cam) { return triangulate(Vec2(u, v), d, cam); },
      py::arg("u"), py::arg("v"), py::arg("disparity"), py::arg("camera"));

#define RW(cls, name) .def_readwrite(#name, &cls::name)
  py::class_<ElasParams>(m, "ElasParams")
      .def(py::init<>())
      .def_static("for_resolution", &ElasParams::for_resolution)
      .def("validate", &ElasParams::validate)
      RW(ElasParams, grid_step) RW(ElasParams, support_ratio) RW(ElasParams, consistency_tolerance)
      RW(ElasParams, min_support_texture) RW(ElasParams, support_window)
      RW(ElasParams, support_agreement) RW(ElasParams, min_support_neighbours) RW(ElasParams, gamma) RW(ElasParams, sigma) RW(ElasParams, beta)
      RW(ElasParams, d_min) RW(ElasParams, d_max) RW(ElasParams, lr_tolerance) RW(ElasParams, left_only)
      RW(ElasParams, subsample) RW(ElasParams, subpixel) RW(ElasParams, speckle_tolerance)
      RW(ElasParams, gap_width);

  py::class_<SgbmParams>(m, "SgbmParams")
      .def(py::init<>())
      .def_static("for_resolution", &SgbmParams::for_resolution)
      .def("validate", &SgbmParams::validate)
      RW(SgbmParams, pre_filter_cap) RW(SgbmParams, sad_window) RW(SgbmParams, p1) RW(SgbmParams, p2)
      RW(SgbmParams, uniqueness_ratio) RW(SgbmParams, speckle_window) RW(SgbmParams, speckle_range)
      RW(SgbmParams, disp12_max_diff) RW(SgbmParams, d_min) RW(SgbmParams, d_max) RW(SgbmParams, directions)
      RW(SgbmParams, subpixel);

  py::class_<SegParams>(m, "SegParams")
      .def(py::init<>())
      .def_static("for_resolution", &SegParams::for_resolution)
      .def("validate", &SegParams::validate)
      RW(SegParams, threshold) RW(SegParams, dilations) RW(SegParams, erosions) RW(SegParams, u_plus)
      RW(SegParams, u_minus) RW(SegParams, min_blob_area) RW(SegParams, roi_margin) RW(SegParams, buffer_len);
#undef RW

  m.def(
      "compute_elas",
      [](const Array<std::uint8_t>& l, const Array<std::uint8_t>& r, const ElasParams& p) {
        GrayImage li = to_image(l), ri = to_image(r);
        py::gil_scoped_release nogil;
        DisparityMap d = compute_elas(li, ri, p);
        py::gil_scoped_acquire gil;
        return disparity_to_array(d);
      },
      py::arg("left"), py::arg("right"), py::arg("params") = ElasParams{},
      "Dense ELAS-style disparity as float32, NaN where invalid.");
  m.def(
      "block_match",
      [](const Array<std::uint8_t>& l, const Array<std::uint8_t>& r, const SgbmParams& p) {
        GrayImage li = to_image(l), ri = to_image(r);
        py::gil_scoped_release nogil;
        DisparityMap d = block_match(li, ri, p);
        py::gil_scoped_acquire gil;
        return disparity_to_array(d);
      },
      py::arg("left"), py::arg("right"), py::arg("params") = SgbmParams{},
      "SGBM-lite disparity as float32, NaN where invalid.");
  m.def(
      "to_8bit",
      [](const Array<float>& d, int d_max) { return to_array(to_8bit(from_float(to_image(d), 0, d_max))); },
      py::arg("disparity"), py::arg("d_max"));
  m.def(
      "preprocess", [](const Array<std::uint8_t>& d8, const SegParams& p) { return to_array(preprocess(to_image(d8), p)); },
      py::arg("disparity8"), py::arg("params") = SegParams{});
  m.def(
      "select_foremost_blob",
      [](const Array<std::uint8_t>& f, const SegParams& p) { return blob_dict(select_foremost_blob(to_image(f), p)); },
      py::arg("filtered"), py::arg("params") = SegParams{});
  m.def(
      "bad_pixel_rate",
      [](const Array<float>& d, const Array<float>& gt, double threshold, int d_max) {
        const auto s = bad_pixel_rate(from_float(to_image(d), 0, d_max), to_image(gt), threshold);
        return py::make_tuple(s.bad_percent, s.density_percent);
      },
      py::arg("disparity"), py::arg("gt"), py::arg("threshold"), py::arg("d_max") = 255,
      "(bad %, density %) over pixels with ground truth.");
  m.def(
      "colorblob_detect",
      [](const Array<std::uint8_t>& rgb, int min_area) -> py::object {
        const auto c = colorblob_detect(array_to_rgb(rgb), HueWindow{}, min_area);
        if (!c) return py::none();
        return py::make_tuple(c->x(), c->y());
      },
      py::arg("rgb"), py::arg("min_area") = 50);

  py::class_<SceneSpec>(m, "SceneSpec")
      .def_static("desk", &SceneSpec::desk, py::arg("width") = 320, py::arg("height") = 240)
      .def_static("parse", &SceneSpec::parse)
      .def("to_text", &SceneSpec::to_text)
      .def("rig", &SceneSpec::rig)
      .def("camera", &SceneSpec::camera)
      .def_readwrite("frames", &SceneSpec::frames)
      .def_readwrite("noise_sigma", &SceneSpec::noise_sigma)
      .def_readwrite("noise_seed", &SceneSpec::noise_seed)
      .def_readonly("width", &SceneSpec::width)
      .def_readonly("height", &SceneSpec::height);
  m.def("two_plane_scene", &two_plane_scene, py::arg("seed"), py::arg("width") = 320, py::arg("height") = 240);
  m.def(
      "render", [](const SceneSpec& s, int frame) { return frame_dict(render(s, frame)); }, py::arg("spec"),
      py::arg("frame") = 0);

  py::class_<TrackerParams>(m, "TrackerParams")
      .def_static(
          "for_resolution",
          [](const std::string& matcher, int w, int h) { return TrackerParams::for_resolution(parse_matcher(matcher), w, h); },
          py::arg("matcher"), py::arg("width"), py::arg("height"))
      .def_readwrite("gaze_alpha", &TrackerParams::gaze_alpha)
      .def_readwrite("seg", &TrackerParams::seg);

  py::class_<AttentionTracker>(m, "AttentionTracker")
      .def(py::init<const StereoRig&, TrackerParams>(), py::arg("rig"), py::arg("params"))
      .def(
          "step",
          [](AttentionTracker& t, const Array<std::uint8_t>& l, const Array<std::uint8_t>& r) {
            const TrackStep st = t.step(to_image(l), to_image(r));
            py::dict d;
            const auto& rec = st.record;
            d["frame"] = rec.frame;
            d["hit"] = rec.hit();
            d["detected"] = rec.detected;
            d["centroid"] = rec.centroid ? py::object(py::make_tuple(rec.centroid->x(), rec.centroid->y())) : py::none();
            d["point"] = rec.point ? py::object(py::cast(Vec3(*rec.point))) : py::none();
            d["t_rect_ms"] = rec.timings.rect_ms;
            d["t_disp_ms"] = rec.timings.disp_ms;
            d["t_seg_ms"] = rec.timings.seg_ms;
            return d;
          },
          py::arg("left"), py::arg("right"))
      .def("gaze_fixation", [](const AttentionTracker& t) { return Vec3(t.gaze().fixation); })
      .def("reset", &AttentionTracker::reset);

  m.def("load_pgm", [](const std::string& p) { return to_array(load_pgm(p)); });
  m.def("save_pgm", [](const Array<std::uint8_t>& a, const std::string& p) { save_pgm(to_image(a), p); });
  m.def("load_pfm", [](const std::string& p) { return to_array(load_pfm(p)); });
  m.def("save_pfm", [](const Array<float>& a, const std::string& p) { save_pfm(to_image(a), p); });
}
