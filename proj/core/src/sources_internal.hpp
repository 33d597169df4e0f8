// Copyright 2026 ftsearch Authors
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

#pragma once

#include <filesystem>
#include <memory>

#include "ftsearch/bulk.hpp"

namespace fts::bulk {

std::unique_ptr<DocumentSource> open_jsonl_source(const std::filesystem::path& path,
                                                  bool gzipped);
std::unique_ptr<DocumentSource> open_parquet_source(const std::filesystem::path& path);

}  // namespace fts::bulk
