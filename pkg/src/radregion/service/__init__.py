from radregion.service.app import AuditService, create_app

__all__ = ["AuditService", "create_app"]
