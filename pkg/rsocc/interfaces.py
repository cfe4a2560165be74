from zope.interface import Attribute, Interface


class ISampler(Interface):
    """
    A component that picks the rows of a preprocessed column to classify as symbols.
    """

    method = Attribute("Short tag recorded in reports, like ``ASM`` or ``CR``.")

    def plan(column, estimate):
        """
        Return a :class:`rsocc.sampler.SamplePlan` for the ``column``, given the
        :class:`rsocc.preprocess.WidthEstimate` in the column's own (resampled) coordinates.

        Raise :class:`rsocc.exceptions.DecodeError` subclasses if no plan is possible.
        """


class IReportStorage(Interface):
    """
    A component to store the records of finished decode runs.
    """

    def add(record):
        """
        Add a finished run, as a ``dict`` of CSV-ready values.
        """

    def list():
        """
        Return the stored records, most recent first.
        """

    def __len__():
        """
        Return the number of stored records.
        """

    def __iter__():
        """
        Iterate over the stored records, most recent first.
        """
