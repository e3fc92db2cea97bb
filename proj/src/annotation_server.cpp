// Copyright 2026 The Argforge Authors.
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

#include "argforge/annotation_server.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <ctime>
#include <fstream>

#include <httplib.h>

namespace argforge::annotation {

LabelStore::LabelStore(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  for (auto& l : parse_labels_tsv(read_file(path_))) {
    if (!keys_.emplace(l.annotator_id, l.task_id).second) {
      throw ValidationError(path_.string() + ": annotator '" + l.annotator_id +
                            "' labeled task '" + l.task_id + "' twice");
    }
    labels_.push_back(std::move(l));
  }
}

bool LabelStore::add(const AnnotatorLabel& label) {
  std::unique_lock lock(mu_);
  if (keys_.contains({label.annotator_id, label.task_id})) return false;
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out << format_label_tsv(label);
  out.flush();
  if (!out) throw std::runtime_error("cannot append to " + path_.string());
  keys_.emplace(label.annotator_id, label.task_id);
  labels_.push_back(label);
  return true;
}

bool LabelStore::has(const std::string& task_id, const std::string& annotator_id) const {
  std::shared_lock lock(mu_);
  return keys_.contains({annotator_id, task_id});
}

std::vector<AnnotatorLabel> LabelStore::snapshot() const {
  std::shared_lock lock(mu_);
  return labels_;
}

std::map<std::string, std::size_t> LabelStore::counts_by_annotator() const {
  std::shared_lock lock(mu_);
  std::map<std::string, std::size_t> counts;
  for (const auto& l : labels_) ++counts[l.annotator_id];
  return counts;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, {{"error", message}});
}

bool valid_id(const std::string& id) {
  return !id.empty() && id.find_first_of("\t\r\n") == std::string::npos;
}

}  // namespace

AnnotationServer::AnnotationServer(std::vector<AnnotationTask> tasks, LabelStore& store,
                                   std::filesystem::path static_dir)
    : tasks_(std::move(tasks)), store_(store), server_(std::make_unique<httplib::Server>()) {
  std::stable_sort(tasks_.begin(), tasks_.end(), [](const auto& a, const auto& b) {
    return a.display_order < b.display_order;
  });
  for (const auto& t : tasks_) task_ids_.insert(t.task_id);
  // Plain SO_REUSEADDR so a second server on the same port fails to bind.
  server_->set_socket_options([this](int sock) {
    socket_ = sock;
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (!static_dir.empty()) server_->set_mount_point("/", static_dir.string());
  install_routes();
}

AnnotationServer::~AnnotationServer() {
  stop();
  if (!ran_ && socket_ >= 0) ::close(socket_);
}

void AnnotationServer::install_routes() {
  server_->Get("/api/tasks/next", [this](const httplib::Request& req,
                                         httplib::Response& res) {
    const std::string annotator = req.get_param_value("annotator");
    if (!valid_id(annotator)) return reply_error(res, 400, "missing annotator id");
    for (const auto& t : tasks_) {
      if (!store_.has(t.task_id, annotator)) return reply_json(res, 200, annotator_view(t));
    }
    res.status = 204;
  });

  server_->Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
    AnnotatorLabel label;
    try {
      const auto body = json::parse(req.body);
      label.task_id = body.at("task_id").get<std::string>();
      label.annotator_id = body.at("annotator_id").get<std::string>();
      label.label = corpus::parse_label(body.at("label").get<std::string>());
    } catch (const json::exception& e) {
      return reply_error(res, 400, std::string("bad label request: ") + e.what());
    } catch (const ValidationError& e) {
      return reply_error(res, 400, e.what());
    }
    if (!valid_id(label.annotator_id)) return reply_error(res, 400, "bad annotator id");
    if (!task_ids_.contains(label.task_id)) {
      return reply_error(res, 400, "unknown task '" + label.task_id + "'");
    }
    label.timestamp = utc_timestamp();
    if (!store_.add(label)) {
      return reply_error(res, 409, "task already labeled by this annotator");
    }
    reply_json(res, 201,
               {{"task_id", label.task_id},
                {"annotator_id", label.annotator_id},
                {"label", corpus::label_name(label.label)},
                {"timestamp", label.timestamp}});
  });

  server_->Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
    json annotators = json::object();
    for (const auto& [id, n] : store_.counts_by_annotator()) annotators[id] = n;
    reply_json(res, 200, {{"total_tasks", tasks_.size()}, {"annotators", annotators}});
  });

  server_->Get("/api/agreement", [this](const httplib::Request&, httplib::Response& res) {
    try {
      reply_json(res, 200, agreement_from_labels(store_.snapshot()).to_json());
    } catch (const ValidationError& e) {
      reply_error(res, 422, e.what());
    }
  });
}

bool AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
    return port_ > 0;
  }
  if (!server_->bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

void AnnotationServer::run() {
  ran_ = true;
  server_->listen_after_bind();
}

void AnnotationServer::stop() {
  if (server_) server_->stop();
}

void AnnotationServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace argforge::annotation
