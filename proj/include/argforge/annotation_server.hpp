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

#ifndef ARGFORGE_ANNOTATION_SERVER_HPP_
#define ARGFORGE_ANNOTATION_SERVER_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "argforge/annotation.hpp"

namespace httplib {
class Server;
}

namespace argforge::annotation {

// Append-only label file shared by concurrent annotators. Existing labels are
// loaded on construction; a second label for the same (task, annotator) is
// rejected.
class LabelStore {
 public:
  explicit LabelStore(std::filesystem::path path);

  // False when the (task, annotator) pair already has a label.
  bool add(const AnnotatorLabel& label);
  bool has(const std::string& task_id, const std::string& annotator_id) const;
  std::vector<AnnotatorLabel> snapshot() const;
  std::map<std::string, std::size_t> counts_by_annotator() const;

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mu_;
  std::vector<AnnotatorLabel> labels_;
  std::set<std::pair<std::string, std::string>> keys_;  // (annotator, task)
};

// "2026-01-31T12:00:00Z"
std::string utc_timestamp();

// Serves the annotation API:
//   GET  /api/tasks/next?annotator=ID  200 {task_id, claim, sentence} | 204
//   POST /api/labels                   201 | 400 | 409
//   GET  /api/progress                 {total_tasks, annotators: {id: count}}
//   GET  /api/agreement                agreement JSON | 422
class AnnotationServer {
 public:
  AnnotationServer(std::vector<AnnotationTask> tasks, LabelStore& store,
                   std::filesystem::path static_dir = {});
  ~AnnotationServer();

  // False when the address cannot be bound (e.g. the port is taken).
  // Port 0 picks a free port.
  bool bind(const std::string& host, int port);
  int port() const { return port_; }
  // Blocks until stop().
  void run();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  std::vector<AnnotationTask> tasks_;  // sorted by display order
  std::set<std::string> task_ids_;
  LabelStore& store_;
  std::unique_ptr<httplib::Server> server_;
  int port_ = -1;
  int socket_ = -1;  // closed by httplib only once run() has started
  bool ran_ = false;
};

}  // namespace argforge::annotation

#endif  // ARGFORGE_ANNOTATION_SERVER_HPP_
