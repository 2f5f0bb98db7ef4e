// Copyright 2026 The GestureQA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gestureqa/service/http.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gestureqa/error.hpp"
#include "gestureqa/media/video.hpp"

namespace gestureqa::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  json body = {{"error", message}};
  // validation messages start with the field name
  const auto colon = message.find(':');
  if (status == 400 && colon != std::string::npos && message.find(' ') > colon) {
    body["field"] = message.substr(0, colon);
  }
  send_json(res, status, body);
}

template <class F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const ValidationError& e) {
    send_error(res, 400, e.what());
  } catch (const FormatError& e) {
    send_error(res, 400, e.what());
  } catch (const NotFoundError& e) {
    send_error(res, 404, e.what());
  } catch (const MediaError& e) {
    send_error(res, 404, e.what());
  } catch (const ContractError& e) {
    send_error(res, 409, e.what());
  } catch (const ConfigError& e) {
    send_error(res, 409, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("media file missing: " + path.filename().string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string content_type(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".wav") return "audio/wav";
  if (ext == ".png") return "image/png";
  if (ext == ".ppm") return "image/x-portable-pixmap";
  if (ext == ".mp4") return "video/mp4";
  if (ext == ".webm") return "video/webm";
  return "application/octet-stream";
}

json assignment_json(const Assignment& a) {
  return {{"rater_id", a.rater_id}, {"sample_id", a.sample_id}, {"video", a.video_url},
          {"audio", a.audio_url},   {"position", a.position},   {"total", a.total}};
}

}  // namespace

struct HttpServer::Impl {
  AnnotationService& service;
  httplib::Server server;

  explicit Impl(AnnotationService& s) : service(s) { routes(); }

  void routes() {
    server.Get("/api/session/:rater/next", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto& rater = req.path_params.at("rater");
        auto next = service.next_sample(rater);
        if (next) {
          send_json(res, 200, {{"done", false}, {"assignment", assignment_json(*next)}});
        } else {
          const Progress p = service.progress(rater);
          send_json(res, 200, {{"done", true}, {"rated", p.rated}, {"total", p.total}});
        }
      });
    });

    server.Post("/api/ratings", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        json body;
        try {
          body = json::parse(req.body);
        } catch (const json::exception& e) {
          throw FormatError(std::string("body: ") + e.what());
        }
        const Ack ack = service.submit_rating(body.get<subjective::RatingRecord>());
        send_json(res, 200,
                  {{"ok", true},
                   {"rater_id", ack.rater_id},
                   {"sample_id", ack.sample_id},
                   {"server_timestamp", ack.server_timestamp},
                   {"replaced", ack.replaced}});
      });
    });

    server.Get("/api/aggregates.csv", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        const auto result = service.export_aggregates();
        std::string excluded;
        for (const auto& r : result.excluded_any) excluded += (excluded.empty() ? "" : ",") + r;
        res.set_header("X-Excluded-Raters", excluded);
        res.set_header("X-Exceptions", std::to_string(result.exceptions.size()));
        res.status = 200;
        res.set_content(subjective::aggregates_csv(result.aggregates), "text/csv");
      });
    });

    server.Get("/api/progress/:rater", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const Progress p = service.progress(req.path_params.at("rater"));
        send_json(res, 200, {{"rater_id", p.rater_id}, {"rated", p.rated}, {"total", p.total}});
      });
    });

    server.Get("/api/media/:sample/audio", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto path = service.media_path(service.sample(req.path_params.at("sample")).audio.path);
        res.set_header("Accept-Ranges", "bytes");
        res.set_content(read_file(path), content_type(path));
      });
    });

    server.Get("/api/media/:sample/video", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto& s = service.sample(req.path_params.at("sample"));
        const auto path = service.media_path(s.video_path);
        if (std::filesystem::is_directory(path)) {
          const auto video = media::FrameDirectoryVideo::open(path);
          json frames = json::array();
          for (std::size_t i = 0; i < video.frame_count(); ++i) {
            frames.push_back("/api/media/" + s.sample_id + "/video/frames/" + std::to_string(i));
          }
          send_json(res, 200,
                    {{"sample_id", s.sample_id}, {"fps", video.fps()}, {"frame_count", video.frame_count()},
                     {"frames", frames}});
        } else {
          res.set_header("Accept-Ranges", "bytes");
          res.set_content(read_file(path), content_type(path));
        }
      });
    });

    server.Get("/api/media/:sample/video/frames/:n", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto& s = service.sample(req.path_params.at("sample"));
        const auto video = media::FrameDirectoryVideo::open(service.media_path(s.video_path));
        std::size_t n = 0;
        try {
          n = std::stoul(req.path_params.at("n"));
        } catch (const std::logic_error&) {
          throw NotFoundError("bad frame index");
        }
        if (n >= video.frame_count()) throw NotFoundError("frame " + std::to_string(n) + " out of range");
        res.set_content(read_file(video.frame_path(n)), content_type(video.frame_path(n)));
      });
    });
  }
};

HttpServer::HttpServer(AnnotationService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace gestureqa::service
