#pragma once

// Everything except the live HTTP transport, which pulls in OpenSSL via
// cpp-httplib; include cfh/net/httplib_transport.hpp separately for that.

#include "cfh/dates.hpp"
#include "cfh/error.hpp"
#include "cfh/evaluation/evaluate.hpp"
#include "cfh/evaluation/metrics.hpp"
#include "cfh/evaluation/records.hpp"
#include "cfh/evaluation/report.hpp"
#include "cfh/forecasting/prompt.hpp"
#include "cfh/forecasting/rag_context.hpp"
#include "cfh/forecasting/reply_parser.hpp"
#include "cfh/forecasting/task.hpp"
#include "cfh/hashing.hpp"
#include "cfh/ingestion/acled.hpp"
#include "cfh/ingestion/compressed.hpp"
#include "cfh/ingestion/corpus.hpp"
#include "cfh/ingestion/csv.hpp"
#include "cfh/ingestion/fetch.hpp"
#include "cfh/ingestion/filter.hpp"
#include "cfh/ingestion/gdelt.hpp"
#include "cfh/ingestion/html_extract.hpp"
#include "cfh/ingestion/records.hpp"
#include "cfh/io.hpp"
#include "cfh/labeling/quantile.hpp"
#include "cfh/labeling/series.hpp"
#include "cfh/labeling/trend.hpp"
#include "cfh/llm/caching_client.hpp"
#include "cfh/llm/chat.hpp"
#include "cfh/llm/http_client.hpp"
#include "cfh/llm/mock.hpp"
#include "cfh/llm/rate_limiter.hpp"
#include "cfh/llm/replay_cache.hpp"
#include "cfh/net/http.hpp"
#include "cfh/net/snapshot_transport.hpp"
#include "cfh/pipeline/commands.hpp"
#include "cfh/pipeline/config.hpp"
#include "cfh/pipeline/manifest.hpp"
#include "cfh/retrieval/chunk.hpp"
#include "cfh/retrieval/embed.hpp"
#include "cfh/retrieval/flat_index.hpp"
#include "cfh/retrieval/summarize.hpp"
#include "cfh/text.hpp"
#include "cfh/version.hpp"
