#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eldercare/risk.hpp"
#include "eldercare/types.hpp"

namespace eldercare {

enum class ContactRole : std::uint8_t { Family, Doctor, Volunteer };
enum class Channel : std::uint8_t { Sms, Push, Call };
enum class AlertSource : std::uint8_t { Automatic, Manual };
enum class DeliveryStatus : std::uint8_t {
  Pending, Delivered, Read, Failed,  // sms and push
  Ringing, Answered, Voicemail,      // call (Failed shared)
};

std::string_view to_string(ContactRole r);
std::string_view to_string(Channel c);
std::string_view to_string(AlertSource s);
std::string_view to_string(DeliveryStatus s);
std::optional<ContactRole> parse_role(std::string_view s);

struct Point {
  double x = 0.0;  // meters
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Contact {
  std::string contact_id;
  ContactRole role = ContactRole::Family;
  std::string phone;
  bool has_app = false;
  std::optional<Point> location;  // volunteers only
  bool available = true;          // volunteers only
};

struct Alert {
  std::string alert_id;
  std::string elder_id;
  Millis created_at = 0;
  AlertLevel level = AlertLevel::Yellow;
  AlertSource source = AlertSource::Automatic;
  RiskDetail risk_detail;
  std::string location = std::string(kUnknownLocation);
};

struct PlanEntry {
  std::string recipient;
  ContactRole role = ContactRole::Family;
  Channel channel = Channel::Sms;

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
  friend auto operator<=>(const PlanEntry&, const PlanEntry&) = default;
};

struct NotificationPlan {
  std::vector<PlanEntry> entries;
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultVolunteerRadius = 1000.0;
inline constexpr std::size_t kMaxVolunteers = 2;

/// Available volunteers within radius, nearest first (ties by id), at most two.
std::vector<Contact> select_volunteers(const Point& elder_location,
                                       std::span<const Contact> volunteers, double radius);

/// Graduated plan: family at every level, doctors from ORANGE, doctor calls
/// and volunteer push at RED. Throws std::invalid_argument for NONE.
NotificationPlan plan_notifications(const Alert& alert, std::span<const Contact> directory,
                                    const Point& elder_location,
                                    double volunteer_radius = kDefaultVolunteerRadius);

struct NotificationRecord {
  std::string record_id;
  std::string alert_id;
  std::string recipient;
  Channel channel = Channel::Sms;
  std::string content_digest;
  Millis sent_at = 0;
  DeliveryStatus status = DeliveryStatus::Pending;
  Millis status_updated_at = 0;
};

std::string record_id_for(std::string_view alert_id, std::string_view recipient, Channel channel);

/// Channel availability seen at dispatch time.
class ChannelHandle {
 public:
  virtual ~ChannelHandle() = default;
  virtual bool is_open(Channel channel) const = 0;
};

/// Text body sent to every recipient of an alert.
std::string notification_content(const Alert& alert);

/// One record per plan entry: pending (sms/push) or ringing (call), or
/// failed when the channel is closed.
std::vector<NotificationRecord> dispatch(const Alert& alert, const NotificationPlan& plan,
                                         const ChannelHandle& channels, Millis now);

class TransitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Receipt {
  DeliveryStatus status = DeliveryStatus::Delivered;
  Millis at = 0;
};

bool transition_allowed(Channel channel, DeliveryStatus from, DeliveryStatus to);

/// Returns the updated record; throws TransitionError on a backward or
/// cross-channel transition.
NotificationRecord update_status(const NotificationRecord& record, const Receipt& receipt);

/// Serialised as one NDJSON line with fixed field order.
std::string audit_line(const NotificationRecord& record);

/// Thread-safe record store with an append-only audit trail.
class NotificationStore {
 public:
  void add(const NotificationRecord& record);
  /// Throws std::out_of_range for unknown ids and TransitionError for
  /// illegal transitions (the record is left unchanged).
  NotificationRecord apply(const std::string& record_id, const Receipt& receipt);
  std::optional<NotificationRecord> find(const std::string& record_id) const;
  std::vector<NotificationRecord> records() const;
  std::vector<std::string> audit_log() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, NotificationRecord> records_;
  std::vector<std::string> order_;
  std::vector<std::string> audit_;
};

/// Issues alert ids and suppresses repeated automatic alerts of the same level
/// inside the dedup window. Manual triggers are never suppressed.
class AlertDesk {
 public:
  explicit AlertDesk(std::string elder_id, Millis dedup_window_ms = 60'000);

  /// nullopt for NONE or when suppressed.
  std::optional<Alert> raise(const RiskAssessment& assessment, std::string location, Millis now);

  /// Immediate RED alert, bypassing risk assessment.
  Alert manual_trigger(Millis now);

  std::size_t suppressed_count() const { return suppressed_; }
  const std::vector<std::string>& suppression_log() const { return suppression_log_; }

 private:
  std::string next_id();

  std::string elder_id_;
  Millis dedup_window_ms_;
  std::size_t counter_ = 0;
  std::size_t suppressed_ = 0;
  std::map<AlertLevel, Millis> last_raised_;
  std::vector<std::string> suppression_log_;
};

/// Standalone form of AlertDesk::manual_trigger.
Alert manual_trigger(const std::string& elder_id, std::string alert_id, Millis now);

}  // namespace eldercare
