#include "mactrace/extraction/ocr_protocol.hpp"

#include <cmath>

#include "mactrace/core/json.hpp"

namespace mactrace {

namespace {

bool valid_rotation(int deg) { return deg == 0 || deg == 90 || deg == 180 || deg == 270; }

Json line_json(const OcrLine& line) {
  Json box = Json::array();
  for (const auto& p : line.box) box.push_back({p.x, p.y});
  return Json{{"text", line.text}, {"confidence", line.confidence}, {"box", box}};
}

[[noreturn]] void malformed(const std::string& reason, std::string_view line) {
  throw BackendMalformedReply(reason, std::string(line));
}

OcrLine parse_line(const Json& j, std::string_view raw) {
  if (!j.is_object()) malformed("line is not an object", raw);
  OcrLine line;
  auto text = j.find("text");
  if (text == j.end() || !text->is_string()) malformed("line without text", raw);
  line.text = text->get<std::string>();
  auto conf = j.find("confidence");
  if (conf == j.end() || !conf->is_number()) malformed("line without confidence", raw);
  line.confidence = conf->get<double>();
  if (!(line.confidence >= 0.0 && line.confidence <= 1.0)) malformed("confidence outside [0,1]", raw);
  auto box = j.find("box");
  if (box == j.end() || !box->is_array() || box->size() != 4) malformed("box must have 4 points", raw);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = (*box)[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      malformed("box point must be [x, y]", raw);
    }
    line.box[i] = {p[0].get<double>(), p[1].get<double>()};
    if (!std::isfinite(line.box[i].x) || !std::isfinite(line.box[i].y)) malformed("non-finite box point", raw);
  }
  return line;
}

}  // namespace

std::string encode_request(const OcrRequest& request) {
  return Json{{"id", request.id},
              {"image", request.image},
              {"segment", request.segment},
              {"rotations", request.rotations}}
      .dump();
}

std::string encode_reply(const OcrReply& reply) {
  Json segments = Json::array();
  for (const auto& s : reply.segments) {
    Json lines = Json::array();
    for (const auto& l : s.lines) lines.push_back(line_json(l));
    segments.push_back({{"segment_index", s.segment_index}, {"rotation_deg", s.rotation_deg}, {"lines", lines}});
  }
  return Json{{"id", reply.id}, {"segments", segments}}.dump();
}

std::string encode_error(const OcrErrorReply& error) {
  return Json{{"id", error.id}, {"error", error.error}}.dump();
}

BackendMessage decode_reply(std::string_view raw) {
  Json j;
  try {
    j = Json::parse(raw);
  } catch (const Json::parse_error&) {
    malformed("reply is not JSON", raw);
  }
  if (!j.is_object()) malformed("reply is not an object", raw);
  auto id = j.find("id");
  if (id == j.end() || !id->is_number_integer()) malformed("reply without integer id", raw);

  if (auto err = j.find("error"); err != j.end()) {
    if (!err->is_string() || j.contains("segments")) malformed("bad error reply", raw);
    return OcrErrorReply{id->get<std::int64_t>(), err->get<std::string>()};
  }
  auto segments = j.find("segments");
  if (segments == j.end() || !segments->is_array()) malformed("reply without segments", raw);

  OcrReply reply;
  reply.id = id->get<std::int64_t>();
  for (const auto& s : *segments) {
    if (!s.is_object()) malformed("segment is not an object", raw);
    auto index = s.find("segment_index");
    auto rotation = s.find("rotation_deg");
    auto lines = s.find("lines");
    if (index == s.end() || !index->is_number_integer() || index->get<int>() < 0) {
      malformed("bad segment_index", raw);
    }
    if (rotation == s.end() || !rotation->is_number_integer() || !valid_rotation(rotation->get<int>())) {
      malformed("bad rotation_deg", raw);
    }
    if (lines == s.end() || !lines->is_array()) malformed("segment without lines", raw);
    SegmentResult result;
    result.segment_index = index->get<int>();
    result.rotation_deg = rotation->get<int>();
    for (const auto& l : *lines) result.lines.push_back(parse_line(l, raw));
    reply.segments.push_back(std::move(result));
  }
  return reply;
}

OcrRequest decode_request(std::string_view raw) {
  Json j;
  try {
    j = Json::parse(raw);
  } catch (const Json::parse_error& e) {
    throw Error(std::string("request is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer()) {
    throw Error("request without integer id");
  }
  OcrRequest request;
  request.id = j["id"].get<std::int64_t>();
  if (!j.contains("image") || !j["image"].is_string()) throw Error("request without image");
  request.image = j["image"].get<std::string>();
  request.segment = j.value("segment", true);
  if (j.contains("rotations")) {
    request.rotations = j["rotations"].get<std::vector<int>>();
    for (int r : request.rotations) {
      if (!valid_rotation(r)) throw Error("unsupported rotation " + std::to_string(r));
    }
  }
  return request;
}

}  // namespace mactrace
