#pragma once

#include <string>

#include "lagdeform/pipeline.hpp"

namespace lagdeform {

enum class ReportFormat { Text, Json };

/// How much of the pipeline a document shows; each stage includes the
/// earlier ones.
enum class ReportStage { Check, Classify, Synthesize, Verify, Full };

/// Text for people, or JSON with sorted keys, shortest round-trip numbers and
/// null in place of non-finite values.
std::string emit_report(const ReportDocument& doc, ReportFormat format, ReportStage stage = ReportStage::Full);

} // namespace lagdeform
